#pragma once

#include <optional>
#include <vector>

#include "selfsim/exterior.hpp"
#include "selfsim/fit.hpp"
#include "selfsim/oracle.hpp"

namespace selfsim {

struct LargeOptions {
  double tol = 1e-13;
  int degree = 32;
  int quad_points = 40;
  int max_iter = 500;
  double eps_small = 0.2;
  double c_max = INFINITY;  // reject c above this when finite
  bool require_large = true;  // reject q̃1 < 1; cleared only for the regime-overlap comparison
};

struct LargeNearConeResult {
  SingularExpansion expansion;  // exponents (2/3, 0, 4/3)
  double qt1 = 0, qt2 = 0;
  double ell = 0;
  double c = 0;
  double a_star = 0;
  double amplitude_at_star = 0;           // |Q(a*)|
  double singular_amplitude_at_star = 0;  // |Q(a*) - Q̃2(a*)|
  // logged constants of the uniform bounds on [1, 1+ℓ]
  double min_q1_over_qt1 = 0;  // min |Q̃1| / q̃1, should be >= 1/2
  double bound_c2 = 0;         // max |Q̃2| / |q̃2|
  double bound_c3 = 0;         // max |Q̃3| / q̃1
};

/// Near-cone system with Q = (a-1)^{2/3} Q̃1 + Q̃2 + (a-1)^{4/3} Q̃3 on [1, 1+ℓ],
/// ℓ = c |q̃2| q̃1^{-4/3}.  Defocusing only.
LargeNearConeResult large_near_cone(double qt1, double qt2, double c, const LargeOptions& opt = {});

struct IntegratingFactor {
  double f, g, w;
};

/// f = (1/2)(8a/3 - 2/a)/(a^2-1), g = 5/(9(a^2-1)^2), w = exp ∫_{1+ℓ}^a f in closed form.
IntegratingFactor integrating_factor(double a, double ell);

/// w^{-6}/(a^2-1), the coefficient of X^8/8 in the energy.
double nonlinear_weight(double a, double ell);

struct ExtensionState {
  double a = 0;
  double x = 0, dx = 0;  // X = Q w and X'
  double w = 0;
  double f = 0, g = 0;
  double energy = 0;
};

/// E = X'^2/2 + g X^2/2 + w^{-6}/(a^2-1) X^8/8.
double energy_functional(const ExtensionState& state, double a, double ell);

/// ExtensionState at a from (Q, Q').
ExtensionState make_extension_state(double a, double q, double dq, double ell);

struct ExtensionOptions {
  double rtol = 1e-12;
  double atol = 1e-15;
  double energy_drift_rel = 1e-8;  // allowed relative energy increase per unit log-path
  int profile_degree = 16;
  double profile_tol = 1e-11;
  bool build_profile = true;
};

struct ExtensionResult {
  double ell = 0;
  double a_start = 0, a_end = 0;
  SampledProfile profile;                // Q on [1+ℓ, a_end]
  std::vector<ExtensionState> trace;     // at every accepted step
  double initial_energy = 0;
  double max_energy_increase_rel = 0;    // largest E(a2) - E(a1), a2 > a1, relative to E(1+ℓ)
  int zero_crossings = 0;
  double a_priori_violation = 0;         // max of |X| / (8 E0 w^6 (a^2-1))^{1/8} - 1 (<= 0 when the bound holds)
  double x_growth_constant = 0;          // D with |X(a)| <= D a^{5/4}

  OdeState state(double a) const;
  /// (8 E0)^{1/8} w^{-1/4} (a^2-1)^{1/8}: the energy bound on |Q|.
  double q_bound(double a) const;

  DenseTrajectory<2> trajectory;
};

/// Integrates X'' + g X + w^{-6}/(a^2-1) X^7 = 0 from a = 1+ℓ to a_far.
ExtensionResult extend_defocusing(const OdeState& boundary, double ell, double a_far, Sign sign,
                                  const ExtensionOptions& opt = {});

struct RematchResult {
  double a_eps = 0;
  double m1 = 0, m2 = 0;
  double newton_residual = 0;
  FarField tail;
  double overlap_error = NAN;  // max |Q_tail - Q_ext| on [a_eps, 2 a_eps] when available
  std::vector<std::pair<double, double>> smallness_trace;  // (a, |Q|+|Q'|) of the scan
};

/// Newton for (m1, m2) in the far field anchored at state.a, matching (Q, Q') there.
RematchResult rematch_far(const OdeState& state, Sign sign, double a_max, const FarFieldOptions& opt = {});

/// Scans the extension at log-spaced points for |Q| + |Q'| < eps_small/2 (cap a_cap),
/// rematches there, and records the overlap error on [a_eps, 2 a_eps].
RematchResult find_and_rematch(const ExtensionResult& ext, Sign sign, double eps_small = 0.2, double a_cap = 1e6,
                               int points_per_decade = 20);

struct LargeGlueOptions {
  double c = NAN;      // default: calibrated c_max / 2
  double a_cap = 1e6;  // hard cap for the a_eps scan and the extension
  double eps_small = 0.2;
  MatchOptions interior{};
  LargeOptions near{};
  ExtensionOptions extension{};
};

struct LargeGlueResult {
  GlobalProfile profile;
  LargeNearConeResult near;
  ExtensionResult extension;
  RematchResult rematch;
};

/// Interior match, q̃2 = q2, large near-cone piece, extension and far-field rematch.
LargeGlueResult glue_large_global(double q0, double qt1, Sign sign, const LargeGlueOptions& opt = {});

struct AmplitudeSweep {
  std::vector<double> qt1;
  std::vector<double> amplitude;           // |Q(a*)|
  std::vector<double> singular_amplitude;  // |Q(a*) - Q̃2(a*)|
  LineFit beta_total;
  LineFit beta_singular;
  double qt2 = 0, c = 0;
};

/// Log-log slope of the a* amplitudes against q̃1, each point computed independently.
AmplitudeSweep sweep_amplitude_exponent(const std::vector<double>& qt1, double qt2, double c, int threads = 1);

/// Largest c (bisection in log c over [c_lo, c_hi]) for which large_near_cone contracts on every
/// grid point with ℓ <= 1.
double calibrate_c_max(const std::vector<double>& qt1_grid, const std::vector<double>& qt2_grid, double c_lo = 1e-3,
                       double c_hi = 1e4, int steps = 40);

/// Default grid used when no grid is configured.
double calibrated_c_max();

}  // namespace selfsim
