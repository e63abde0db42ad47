#pragma once

#include <array>
#include <vector>

namespace selfsim {

/// Splits (d^{2/3} Q1 + Q2 + d^{p3/3} Q3)^7 = N0 + d^{2/3} N1 + d^{4/3} N2 with
/// N0, N1, N2 polynomial in (Q1, Q2, Q3) and integer powers of d.
/// Exact multinomial expansion over m1 + m2 + m3 = 7; each term carries
/// d^{(2 m1 + p3 m3)/3} and is binned by that exponent (in thirds) mod 3.
class SeventhPowerSplit {
 public:
  struct Term {
    double coeff;
    int m1, m2, m3;
    int bin;       // 0, 1, 2 for N0, N1, N2
    int d_power;   // integer power of d left after removing the bin factor
  };

  explicit SeventhPowerSplit(int p3_thirds);

  /// (N0, N1, N2) at a point with d = |1-b| >= 0.
  std::array<double, 3> operator()(double d, double q1, double q2, double q3) const;

  const std::vector<Term>& terms() const { return terms_; }
  int p3_thirds() const { return p3_; }

 private:
  int p3_;
  std::vector<Term> terms_;
};

}  // namespace selfsim
