#pragma once

#include <array>
#include <functional>
#include <vector>

#include "selfsim/fit.hpp"
#include "selfsim/global_profile.hpp"

namespace selfsim {

/// χ(v) = S((|v|-C)/C), S(x) = g(x)/(g(x)+g(1-x)), g(x) = exp(-1/x) for x > 0:
/// 0 for |v| <= C, 1 for |v| >= 2C, even in v.
struct CutoffSpec {
  double C = 1.0;
};

/// χ and its first two derivatives in v.
double chi(double v, const CutoffSpec& spec, int deriv_order = 0);

struct FieldValue {
  double u = 0, ut = 0, ur = 0;
};

/// u(t,r) = t^{-1/3} [ χ(t-r) (Q(r/t) - Q2(1)) + Q2(1) ], which equals
/// t^{-1/3} χ |1-a|^{2/3} X(a) + t^{-1/3} Q2(1) with X the folded singular part.
class ApproxSolutionField {
 public:
  ApproxSolutionField(GlobalProfile profile, CutoffSpec cutoff);

  double u(double t, double r) const;
  FieldValue eval(double t, double r) const;

  /// X(a) = Q1 + |1-a|^{1/3} Q̃3 on near-cone pieces, (Q - Q2(1)) / |1-a|^{2/3} elsewhere.
  double X(double a) const;
  /// Q̃3 = |1-a|^{e3-1} Q3 + |1-a|^{-1} (Q2 - Q2(1)) on near-cone pieces.
  double Q3_tilde(double a) const;
  /// |1-a|^{2/3} X'(a) from the components: |1-a|^{2/3} Q1' + |1-a| Q̃3' - (1/3) sgn(1-a) Q̃3.
  double weighted_dX_components(double a) const;
  /// Same quantity by direct differentiation of Y = Q - Q2(1) = |1-a|^{2/3} X.
  double weighted_dX_direct(double a) const;

  double cone_value() const { return q2_; }
  const GlobalProfile& profile() const { return profile_; }
  const CutoffSpec& cutoff() const { return cutoff_; }

 private:
  GlobalProfile profile_;
  CutoffSpec cutoff_;
  double q2_ = 0;
};

ApproxSolutionField build_approx(GlobalProfile profile, CutoffSpec spec = {});

struct E3Check {
  double lhs = 0, rhs = 0, difference = 0;
};

/// Four-term expansion of (−∂t² + ∂r² + (2/r)∂r)' (t^{-1/3} |1-a|^{2/3} χ(t-r)) with one derivative on χ,
/// against the closed form −2(t−r)|t−r|^{2/3} χ'(t−r) / (r t²).
E3Check e3_identity_check(double t, double r, const CutoffSpec& spec);

enum class StripBranch { off_strip, center_plateau, transition };

struct ErrorFields {
  double e1 = 0, e2 = 0, e3 = 0;
  double e3_undifferentiated = 0;  // −2(t−r)|t−r|^{2/3} χ' X / (r t²)
  double e3_derivative = 0;        // 2 t^{-7/3} (r−t) |1−a|^{2/3} X' χ'
  StripBranch branch = StripBranch::off_strip;
  double total() const { return e1 + e2 + e3; }
};

/// e1 = −(1−χ)(4/9) Q2(1) t^{-7/3}; e2 = s t^{-7/3}[χ (Y+q2)^7 − (χY+q2)^7];
/// e3 = the χ', χ'' terms.  Their sum is (−∂t² + Δ)u − s u^7.
ErrorFields error_fields(const ApproxSolutionField& field, double t, double r);

struct DecayFit {
  LineFit fit;
  double t_lo = 0, t_hi = 0;
};

struct StripNorms {
  double l2 = 0, sup = 0;
};

/// Radial L2 norm and sampled max of e(t, ·) over the strip |t−r| ≤ 2C (four Gauss–Legendre panels).
StripNorms strip_norms(const std::function<double(double, double)>& e, double t, double C,
                       int points_per_panel = 48);

/// Power-law fit of values against t.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& values);

struct ErrorDecayReport {
  std::vector<double> t;
  std::array<std::vector<double>, 3> l2;   // radial L2 norm over the strip, per field
  std::array<std::vector<double>, 3> sup;  // max over strip samples, per field
  std::array<DecayFit, 3> l2_fit;
  std::array<DecayFit, 3> sup_fit;
  std::array<bool, 3> l1_integrable{};  // L2 exponent < −1
};

/// Strip norms of e1, e2, e3 for each t and their fitted power laws; t values run in parallel.
ErrorDecayReport error_decay_report(const ApproxSolutionField& field, const std::vector<double>& t_list,
                                    int threads = 1, int points_per_panel = 48);

/// Radial L^q_x norm of u(t, ·) over ℝ^3, by quadrature in r with strip-aware panels.
double field_lq_norm(const ApproxSolutionField& field, double t, double q);

/// ‖u‖_{L^p_t([T, T+1], L^q_x)}: Gauss–Legendre in t.
double field_strichartz_window(const ApproxSolutionField& field, double T, double p, double q, int t_points = 8);

}  // namespace selfsim
