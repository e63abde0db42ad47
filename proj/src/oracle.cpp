#include "selfsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace selfsim {

Eigen::Vector2d profile_rhs(double a, const Eigen::Vector2d& y, Sign sign) {
  const double q = y[0], dq = y[1];
  const double q2 = q * q, q7 = q2 * q2 * q2 * q;
  const double rest = (8.0 * a / 3.0 - 2.0 / a) * dq + 4.0 / 9.0 * q + sign_factor(sign) * q7;
  return {dq, -rest / ((a - 1.0) * (a + 1.0))};
}

OdeState OracleSolution::final_state() const {
  const auto& y = traj_.final_state();
  return {traj_.end(), y[0], y[1]};
}

OdeState OracleSolution::operator()(double a) const {
  const auto y = traj_(a);
  return {a, y[0], y[1]};
}

double OracleSolution::second_derivative(double a) const {
  const auto y = traj_(a);
  return profile_rhs(a, y, sign_)[1];
}

OracleSolution oracle_integrate(const OdeState& start, double a_end, Sign sign, const OracleOptions& opt) {
  const double lo = std::min(start.a, a_end), hi = std::max(start.a, a_end);
  for (double sing : {0.0, 1.0}) {
    const double dist = (sing < lo) ? lo - sing : (sing > hi ? sing - hi : 0.0);
    if (dist < opt.singular_standoff) {
      std::ostringstream os;
      os.precision(17);
      os << "singular approach: path [" << lo << ", " << hi << "] within standoff of a = " << sing;
      throw SingularApproach(os.str(), sing);
    }
  }
  DopriOptions dop;
  dop.rtol = opt.rtol;
  dop.atol = opt.atol;
  auto traj = dopri5<2>([sign](double a, const Eigen::Vector2d& y) { return profile_rhs(a, y, sign); }, start.a,
                        Eigen::Vector2d(start.q, start.dq), a_end, dop);
  return OracleSolution(std::move(traj), sign);
}

OdeState interior_series(double q0, Sign sign, double a, int terms) {
  // Coefficients of a^{2k}.  c_{m+2} = ((m+1/3)(m+4/3) c_m + s p_m) / ((m+2)(m+3)),
  // p_m the a^m coefficient of Q^7.
  const double s = sign_factor(sign);
  std::vector<double> c(static_cast<std::size_t>(terms), 0.0);
  c[0] = q0;
  // powers[j][k]: coefficient k of Q^{j}, j = 1..7, for even-index series
  std::vector<std::vector<double>> pw(8, std::vector<double>(static_cast<std::size_t>(terms), 0.0));
  for (int k = 0; k + 1 < terms; ++k) {
    pw[1][k] = c[k];
    for (int j = 2; j <= 7; ++j) {
      double acc = 0.0;
      for (int i = 0; i <= k; ++i) acc += pw[j - 1][i] * c[k - i];
      pw[j][k] = acc;
    }
    const double m = 2.0 * k;
    c[k + 1] = ((m + 1.0 / 3.0) * (m + 4.0 / 3.0) * c[k] + s * pw[7][k]) / ((m + 2.0) * (m + 3.0));
  }
  const double a2 = a * a;
  double q = 0.0, dq = 0.0, p = 1.0;
  for (int k = 0; k < terms; ++k) {
    q += c[k] * p;
    if (k > 0) dq += 2.0 * k * c[k] * p / a;
    p *= a2;
  }
  if (a == 0.0) dq = 0.0;
  return {a, q, dq};
}

}  // namespace selfsim
