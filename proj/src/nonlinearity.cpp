#include "selfsim/nonlinearity.hpp"

#include <stdexcept>

namespace selfsim {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

SeventhPowerSplit::SeventhPowerSplit(int p3_thirds) : p3_(p3_thirds) {
  if (p3_thirds <= 0) throw std::invalid_argument("SeventhPowerSplit: exponent must be positive");
  constexpr int offset[3] = {0, 2, 4};
  for (int m1 = 0; m1 <= 7; ++m1) {
    for (int m3 = 0; m1 + m3 <= 7; ++m3) {
      const int m2 = 7 - m1 - m3;
      const int e = 2 * m1 + p3_thirds * m3;
      const int bin = (e % 3 == 0) ? 0 : (e % 3 == 2 ? 1 : 2);
      const int rest = e - offset[bin];
      if (rest < 0 || rest % 3 != 0) throw std::logic_error("SeventhPowerSplit: negative residual power");
      const double c = factorial(7) / (factorial(m1) * factorial(m2) * factorial(m3));
      terms_.push_back({c, m1, m2, m3, bin, rest / 3});
    }
  }
}

std::array<double, 3> SeventhPowerSplit::operator()(double d, double q1, double q2, double q3) const {
  double p1[8], p2[8], p3[8], pd[16];
  p1[0] = p2[0] = p3[0] = 1.0;
  for (int i = 1; i < 8; ++i) {
    p1[i] = p1[i - 1] * q1;
    p2[i] = p2[i - 1] * q2;
    p3[i] = p3[i - 1] * q3;
  }
  pd[0] = 1.0;
  for (int i = 1; i < 16; ++i) pd[i] = pd[i - 1] * d;
  std::array<double, 3> n{0.0, 0.0, 0.0};
  for (const Term& t : terms_) {
    const double dp = t.d_power < 16 ? pd[t.d_power] : ipow(d, t.d_power);
    n[t.bin] += t.coeff * dp * p1[t.m1] * p2[t.m2] * p3[t.m3];
  }
  return n;
}

}  // namespace selfsim
