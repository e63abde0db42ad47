#pragma once

#include "selfsim/chebyshev.hpp"
#include "selfsim/fundamental.hpp"
#include "selfsim/provenance.hpp"
#include "selfsim/sampled_profile.hpp"
#include "selfsim/sign.hpp"

namespace selfsim {

struct FarFieldOptions {
  double tol = 1e-14;
  int degree = 32;
  int quad_points = 40;
  int max_iter = 500;
  int stall_limit = 10;
  double eps_small = 0.2;
  bool enforce_eps_small = true;
};

/// Exterior solution for a >= a0 written as Q(a) = a^{-1/3} R(1/a).  With z = 1/a the
/// far-field integral equation Q = m1 φ̃1 + m2 φ2 - s ∫_a^∞ G Q^7 db becomes
///   R(z) = m1 (1-z)^{2/3} + m2 (1+z)^{2/3}
///        + s ∫_0^z (1-ζ^2)^{-2/3} R(ζ)^7 [(1-z)^{2/3} ζ Q0(ζ) - (1-ζ)^{2/3} z Q0(z)] dζ,
/// whose integrand is analytic on [0, 1/a0], so no truncation of the a-axis is needed.
class FarField {
 public:
  FarField() = default;
  FarField(double m1, double m2, Sign sign, double a0, ChebSeries r, Provenance prov);

  double m1() const { return m1_; }
  double m2() const { return m2_; }
  double anchor() const { return a0_; }
  Sign sign() const { return sign_; }

  double value(double a) const;
  Jet<double> jet(double a) const;

  /// a^{1/3} Q(a) = R(0) + R'(0)/a + O(a^{-2}):  R(0) = m1 + m2, R'(0) = (2/3)(m2 - m1).
  double coefficient_one_third() const { return r_(0.0); }
  double coefficient_four_thirds() const { return dr_(0.0); }

  const ChebSeries& r_series() const { return r_; }
  const Provenance& provenance() const { return prov_; }

  /// Graded piecewise-Chebyshev view on [a0, a_max] (panels doubling in length).
  SampledProfile sampled(double a_max, int degree = 24) const;

 private:
  void check(double a) const;
  double m1_ = 0, m2_ = 0, a0_ = 2;
  Sign sign_ = Sign::defocusing;
  ChebSeries r_, dr_, ddr_;
  Provenance prov_;
};

/// Fixed point of the far-field equation on [a0, ∞).
FarField solve_far_field(double m1, double m2, Sign sign, double a0, const FarFieldOptions& opt = {});

}  // namespace selfsim
