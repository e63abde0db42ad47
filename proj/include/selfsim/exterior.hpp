#pragma once

#include <optional>

#include "selfsim/far_field.hpp"
#include "selfsim/global_profile.hpp"
#include "selfsim/interior.hpp"

namespace selfsim {

/// Expansion Q = (a-1)^{2/3} Q̃1 + Q̃2 + (a-1)^{7/3} Q̃3 on [1, 2], Q̃1(1) = q̃1, Q̃2(1) = q̃2.
SingularExpansion near_cone_exterior(double qt1, double qt2, Sign sign, const NearConeOptions& opt = {});

/// Far field from a = 2 sampled on [2, a_max].
SampledProfile far_field(double m1, double m2, Sign sign, double a_max, const FarFieldOptions& opt = {});

struct ExteriorMatch {
  double qt1 = 0, qt2 = 0;
  double m1 = 0, m2 = 0;
  double newton_residual = 0;
  int newton_iterations = 0;
  double jacobian_condition = 0;
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
  SingularExpansion near;
  FarField far;
};

struct ExteriorOptions {
  NearConeOptions near_cone{};
  FarFieldOptions far_field{};
  double newton_tol = 1e-14;
};

/// Newton on (m1, m2) so the far field meets the near-cone expansion in (Q, Q') at a = 2.
ExteriorMatch match_at_two(double qt1, double qt2, Sign sign, double a_max, const ExteriorOptions& opt = {});

/// (m1, m2) whose far field has no a^{-1/3} term and a^{-4/3} coefficient m.
/// Secant iteration on the ratio m2/m1 against the a^{-1/3} coefficient R(0).
std::pair<double, double> decay_tune(double m, Sign sign, double a_max, const FarFieldOptions& opt = {});

struct GlueOptions {
  double a_max = 1e4;
  std::optional<double> qt1;  // default: q̃1 = q1
  DecayClass decay = DecayClass::generic_a_minus_one_third;  // requested; the profile reports the measured class
  MatchOptions interior{};
  ExteriorOptions exterior{};
  double tune_tol = 1e-15;
};

/// Interior match, cross-cone condition q̃2 = q2, exterior match, assembled on [0, ∞).
/// For the tuned decay class q̃1 is chosen by secant so that the a^{-1/3} coefficient vanishes.
GlobalProfile glue_global(double q0, Sign sign, const GlueOptions& opt = {});

}  // namespace selfsim
