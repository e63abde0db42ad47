#include "selfsim/far_field.hpp"

#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/quadrature.hpp"

namespace selfsim {

namespace {

double two_thirds(double x) {
  const double c = std::cbrt(x);
  return c * c;
}

double pow7(double x) {
  const double x2 = x * x;
  return x2 * x2 * x2 * x;
}

}  // namespace

FarField::FarField(double m1, double m2, Sign sign, double a0, ChebSeries r, Provenance prov)
    : m1_(m1), m2_(m2), a0_(a0), sign_(sign), r_(std::move(r)), prov_(std::move(prov)) {
  dr_ = r_.derivative();
  ddr_ = dr_.derivative();
}

void FarField::check(double a) const {
  if (!(a >= a0_)) {
    std::ostringstream os;
    os.precision(17);
    os << "FarField: a = " << a << " below anchor " << a0_;
    throw DomainError(os.str());
  }
}

double FarField::value(double a) const {
  check(a);
  if (std::isinf(a)) return 0.0;
  const double z = 1.0 / a;
  return std::cbrt(z) * r_(z);
}

Jet<double> FarField::jet(double a) const {
  check(a);
  const double z = 1.0 / a;
  const double c = std::cbrt(z);
  const double r = r_(z), dr = dr_(z), ddr = ddr_(z);
  const double z43 = z * c, z73 = z * z * c, z103 = z * z * z * c, z133 = z * z * z * z * c;
  return {c * r, -z43 * r / 3.0 - z73 * dr, 4.0 / 9.0 * z73 * r + 8.0 / 3.0 * z103 * dr + z133 * ddr};
}

SampledProfile FarField::sampled(double a_max, int degree) const {
  if (!(a_max > a0_)) throw DomainError("FarField::sampled: a_max must exceed the anchor");
  std::vector<SampledProfile::Panel> panels;
  double lo = a0_;
  while (lo < a_max) {
    const double hi = std::min(2.0 * lo, a_max);
    const Eigen::VectorXd x = ChebSeries::nodes(lo, hi, degree);
    Eigen::VectorXd q(degree + 1), dq(degree + 1), ddq(degree + 1);
    for (int j = 0; j <= degree; ++j) {
      const auto jt = jet(x[j]);
      q[j] = jt.value;
      dq[j] = jt.d1;
      ddq[j] = jt.d2;
    }
    panels.push_back({ChebSeries(lo, hi, q), ChebSeries(lo, hi, dq), ChebSeries(lo, hi, ddq)});
    lo = hi;
  }
  Provenance p = prov_;
  p.params["a_max"] = a_max;
  return SampledProfile(std::move(panels), std::move(p));
}

FarField solve_far_field(double m1, double m2, Sign sign, double a0, const FarFieldOptions& opt) {
  if (!(a0 > 1.0)) throw DomainError("solve_far_field: anchor must exceed 1");
  if (opt.enforce_eps_small && (std::abs(m1) >= opt.eps_small || std::abs(m2) >= opt.eps_small)) {
    std::ostringstream os;
    os << "far_field: coefficients (" << m1 << ", " << m2 << ") not below eps_small = " << opt.eps_small;
    throw DomainError(os.str());
  }
  const int n = opt.degree, nq = opt.quad_points;
  const double zmax = 1.0 / a0;
  const double s = sign_factor(sign);
  const Eigen::VectorXd z = ChebSeries::nodes(0.0, zmax, n);
  const GaussRule gl = gauss_legendre01(nq);
  Eigen::MatrixXd interp((n + 1) * nq, n + 1);
  Eigen::VectorXd kern((n + 1) * nq);
  Eigen::VectorXd hom(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double zj = z[j];
    hom[j] = m1 * two_thirds(1.0 - zj) + m2 * two_thirds(1.0 + zj);
    const double q0z = linear_seed(zj).value;
    const double t1 = two_thirds(1.0 - zj);
    for (int k = 0; k < nq; ++k) {
      const int row = j * nq + k;
      const double zeta = zj * gl.x[k];
      interp.row(row) = ChebSeries::interpolation_row(0.0, zmax, n, zeta);
      const double bracket = t1 * zeta * linear_seed(zeta).value - two_thirds(1.0 - zeta) * zj * q0z;
      kern[row] = zj * gl.w[k] * bracket / two_thirds(1.0 - zeta * zeta);
    }
  }
  Provenance prov;
  prov.construction = "far_field";
  prov.params = {{"m1", m1}, {"m2", m2}, {"s", s}, {"anchor", a0}, {"degree", n}, {"quad_points", nq}};
  prov.notes["green_sign"] = "Q = m1*phi1t + m2*phi2 - s*int_a^inf G Q^7 db";
  prov.notes["representation"] = "Q(a) = a^{-1/3} R(1/a), Chebyshev in z = 1/a";
  Eigen::VectorXd r = hom;
  double prev = INFINITY;
  int stall = 0;
  const double scale = std::max({std::abs(m1), std::abs(m2), 1e-300});
  for (int it = 1; it <= opt.max_iter; ++it) {
    const Eigen::VectorXd rb = interp * r;
    Eigen::VectorXd next = hom;
    for (int j = 0; j <= n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < nq; ++k) acc += kern[j * nq + k] * pow7(rb[j * nq + k]);
      next[j] += s * acc;
    }
    if (!next.allFinite()) throw ContractionFailure("far-field contraction failure: iterate diverged", it, INFINITY);
    const double inc = (next - r).cwiseAbs().maxCoeff();
    r = std::move(next);
    if (inc <= opt.tol * std::max(1.0, scale) || inc == 0.0) {
      prov.params["iterations"] = it;
      prov.params["final_increment"] = inc;
      return FarField(m1, m2, sign, a0, ChebSeries(0.0, zmax, r), std::move(prov));
    }
    if (inc >= prev && ++stall >= opt.stall_limit)
      throw ContractionFailure("far-field contraction failure: increments stopped decreasing", it, inc);
    if (inc < prev) stall = 0;
    if (inc > 1e8 * std::max(1.0, scale)) throw ContractionFailure("far-field contraction failure: diverged", it, inc);
    prev = inc;
  }
  throw ContractionFailure("far-field contraction failure: iteration budget exhausted", opt.max_iter, prev);
}

}  // namespace selfsim
