#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "selfsim/fit.hpp"
#include "selfsim/regularization.hpp"
#include "selfsim/sign.hpp"

namespace selfsim {

/// Radial field on the uniform grid r_i = i h, i = 0..N.
struct RadialGridState {
  Eigen::VectorXd r, u, ut;
  double t = 0;
  Sign sign = Sign::defocusing;

  double h() const { return r.size() > 1 ? r[1] - r[0] : 0.0; }
  int n_cells() const { return static_cast<int>(r.size()) - 1; }
  double r_max() const { return r[r.size() - 1]; }
};

RadialGridState make_grid_state(double r_max, int n_cells, double t, Sign sign);

/// Fill u, ut from f(t, r) -> {u, ut}.
void sample_field(RadialGridState& s, const std::function<std::array<double, 2>(double, double)>& f);

struct DiagnosticsRecord {
  double t = 0;
  double energy = 0;              // 4π ∫ ½ut² + ½ur² + (s/8) u⁸ over [0, R]
  double energy_inside_cone = 0;  // same integral over r < t
  double sup_u = 0;
  double critical_proxy = 0;      // ‖u‖_{L⁹} + ‖ut‖_{L^{9/4}}
};

using DiagnosticsTrace = std::vector<DiagnosticsRecord>;

struct EvolveOptions {
  double t_end = 1.0;
  double cfl = 0.5;
  int order = 4;                     // spatial stencil order, 2 or 4
  bool nonlinear = true;
  std::vector<double> output_times;  // snapshots are stored at these times (and at t_end)
  /// u(t, R) imposed at the outer node; unset keeps the initial boundary value.
  std::function<double(double)> outer_u;
  /// Forcing f in u_tt − Δu + s u⁷ = f.
  std::function<double(double, double)> source;
  double blowup_threshold = 1e6;
  /// dt ≤ nonlinear_dt / max|u|³ resolves the ODE growth rate of the nonlinearity.
  double nonlinear_dt = 0.02;
  int diagnostics_every = 1;
  /// Samples (t, u(t, 0)) every step when set.
  bool record_origin = false;
};

struct Trajectory {
  std::vector<RadialGridState> snapshots;
  DiagnosticsTrace trace;
  std::vector<std::array<double, 2>> origin;
  bool blew_up = false;
  double blowup_time = 0;
  RadialGridState last_good;
  long steps = 0;
};

/// Method of lines for w = r u: w_tt = w_rr − s w⁷/r⁶ + r f, odd reflection at r = 0,
/// u(0) = (8 w1 − w2)/(6h), classical RK4 in time.  Throws ConfigError if cfl > 0.5 or order ∉ {2, 4}.
Trajectory evolve(const RadialGridState& initial, const EvolveOptions& opt);

/// ∂_r u on the grid: central differences of the chosen order, even reflection at r = 0.
Eigen::VectorXd radial_derivative(const RadialGridState& s, int order = 4);

/// (4π ∫ |f|^p r² dr)^{1/p} by the trapezoid rule on the grid; p = ∞ is the max.
double grid_lp_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& f, double p, double r_cut = INFINITY);

DiagnosticsRecord diagnostics(const RadialGridState& s);

struct EnergyReport {
  double kinetic = 0, gradient = 0, potential = 0, total = 0;
  /// Perturbation part, relative to an approximate solution u: ½(vt² + vr²), and
  /// s/8 · C(8, k) ∫ u^{8−k} v^k for k = 2..8 stored at index k.
  bool has_field = false;
  double v_quadratic = 0;
  std::array<double, 9> coupling{};
  std::array<double, 9> coupling_weight{};
};

EnergyReport energy_report(const RadialGridState& s, const ApproxSolutionField* field = nullptr);

/// 1/(3p) + 1/q = 1/9 with 3 < p ≤ ∞.
bool strichartz_admissible(double p, double q);

/// ‖u‖_{L^p_t L^q_x} over the snapshot times by the trapezoid rule in t.  Throws ConfigError if
/// (p, q) is inadmissible.
double strichartz_proxy(const std::vector<RadialGridState>& snapshots, double p, double q);

struct PerturbationSpec {
  double delta = 1e-3;  // target critical proxy of (v0, v1)
  double center = 3.0;
  double width = 1.0;   // v0 = A ψ((r − center)/width), ψ(x) = exp(1 − 1/(1 − x²))
  bool outgoing = true; // v1 = −(r v0)_r / r, otherwise v1 = 0
};

struct PerturbOptions {
  double t0 = 1.0;
  double t_end = 5.0;
  double h = 1.0 / 32.0;
  double cfl = 0.5;
  double margin = 4.0;  // R = t_end + 2C + margin + center + width
  int samples = 41;     // snapshot times
};

struct PerturbReport {
  std::vector<double> t;
  std::vector<double> proxy_total;      // ũ minus the approximate solution
  std::vector<double> proxy_relative;   // ũ minus the evolved unperturbed data
  std::vector<double> v_energy;         // ½∫(vt² + vr²) of the relative v
  double initial_proxy = 0;
  double max_ratio_total = 0, max_ratio_relative = 0;
  bool blew_up = false;
  double r_max = 0;
  int n_cells = 0;
};

/// Evolves u(t0) + v0 and u(t0) with the same grid, outer boundary from the field; proxies are
/// ‖v‖_{L⁹} + ‖vt‖_{L^{9/4}} at each snapshot.
PerturbReport perturb_and_evolve(const ApproxSolutionField& field, const PerturbationSpec& v0,
                                 const PerturbOptions& opt);

/// Energy flux into {r < t} through the null boundary:
/// d/dt E_{r<t} = 4π t² [½(ut + ur)² + (s/8) u⁸] at r = t, interpolated from the grid.
/// ut + ur is the derivative along the cone and stays bounded for profiles with the |1−a|^{2/3} singularity.
double cone_energy_flux(const RadialGridState& s);

/// E_{r<t} of the exact self-similar field t^{-1/3} Q(r/t): t^{1/3} · 4π ∫_0^1 e(a) a² da, with the
/// substitution a = 1 − x³ removing the |1−a|^{-2/3} singularity of the density at the cone.
double self_similar_energy_inside_cone(const GlobalProfile& profile, double t, int points = 200);

struct ConeEnergyGrowth {
  std::vector<double> t, energy, flux;
  LineFit fit;  // log E_{r<t} against log t
  int cells_per_unit = 0;
};

/// Evolves exact self-similar data from t0 to t1 and accumulates E_{r<t}(t) = E_{r<t}(t0) + ∫ flux,
/// with the flux measured on the evolved grid and E_{r<t}(t0) from the profile.
ConeEnergyGrowth self_similar_energy_growth(const GlobalProfile& profile, double t0, double t1,
                                           int cells_per_unit = 64, int samples = 180);

/// Blow-up time of u'' = u⁷, u(0) = u0, u'(0) = 0.
double ode_blowup_time(double u0);

}  // namespace selfsim
