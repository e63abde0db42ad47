#pragma once

#include <functional>
#include <string>

#include "selfsim/sampled_profile.hpp"
#include "selfsim/singular_expansion.hpp"

namespace selfsim {

struct InteriorOptions {
  double tol = 1e-12;
  int degree = 32;       // Chebyshev degree on [0, 1/2]
  int quad_points = 40;  // Gauss–Legendre points in u
  int max_iter = 500;
  int stall_limit = 10;
  double q_max = 0.2;
  bool enforce_q_max = true;
};

struct NearConeOptions {
  double tol = 1e-13;
  int degree = 32;
  int quad_points = 40;
  int max_iter = 500;
  double eps_small = 0.2;
  bool enforce_eps_small = true;
};

/// Fixed point of Q(a) = q0 Q0(a) + s a ∫_0^1 G̃(a,u) Q(au)^7 du on [0, 1/2].
SampledProfile picard_interior(double q0, Sign sign, const InteriorOptions& opt = {});

/// Right-hand side of the interior integral equation applied to a profile, at a.
double interior_map(const SampledProfile& profile, double q0, Sign sign, double a, int quad_points = 40);

/// Expansion Q = (1-a)^{2/3} Q1 + Q2 + (1-a)^{7/3} Q3 on [1/2, 1] with Q1(1) = q1, Q2(1) = q2.
SingularExpansion near_cone_interior(double q1, double q2, Sign sign, const NearConeOptions& opt = {});

struct InteriorMatch {
  double q0 = 0, q1 = 0, q2 = 0;
  double newton_residual = 0;
  int newton_iterations = 0;
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Zero();
  std::vector<std::vector<double>> trail;
  SampledProfile inner;
  SingularExpansion outer;
};

struct MatchOptions {
  InteriorOptions interior{};
  NearConeOptions near_cone{};
  double newton_tol = 1e-14;
};

/// Solves for (q1, q2) so that the near-cone expansion and the Picard profile
/// share Q(1/2) and Q'(1/2).
InteriorMatch match_at_half(double q0, Sign sign, const MatchOptions& opt = {});

enum class ExponentModel { pure_power, power_plus_linear };

struct ExponentFit {
  double exponent = 0;
  double ci95_half = 0;
  double residual = 0;        // rms residual of the model (log or relative)
  double pure_slope = 0;      // plain log-log slope on the same window
  double pure_ci95_half = 0;
  double window_lo = 0, window_hi = 0;
  int samples = 0;
  ExponentModel model = ExponentModel::power_plus_linear;
};

/// Fits p in Q(a) - Q(1) ≈ A d^p (+ B d + C d^{p+1}), d = |1-a| in [d_lo, d_hi].
/// The plain log-log slope on the same samples is always reported as well.
ExponentFit fit_singular_exponent(const std::function<double(double)>& q, double cone_value, ConeSide side,
                                  double d_lo, double d_hi, ExponentModel model = ExponentModel::power_plus_linear,
                                  int per_decade = 10);

/// Bisection for the largest q0 whose interior iteration still contracts.
double calibrate_q_boundary(Sign sign, double hi = 2.0, int steps = 30);

}  // namespace selfsim
