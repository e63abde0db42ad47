#include "selfsim/wave_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selfsim/errors.hpp"
#include "selfsim/quadrature.hpp"

namespace selfsim {

using Eigen::VectorXd;

RadialGridState make_grid_state(double r_max, int n_cells, double t, Sign sign) {
  if (!(r_max > 0.0) || n_cells < 8) throw ConfigError("make_grid_state: need r_max > 0 and at least 8 cells");
  RadialGridState s;
  s.r = VectorXd::LinSpaced(n_cells + 1, 0.0, r_max);
  s.u = VectorXd::Zero(n_cells + 1);
  s.ut = VectorXd::Zero(n_cells + 1);
  s.t = t;
  s.sign = sign;
  return s;
}

void sample_field(RadialGridState& s, const std::function<std::array<double, 2>(double, double)>& f) {
  for (Eigen::Index i = 0; i < s.r.size(); ++i) {
    const auto v = f(s.t, s.r[i]);
    s.u[i] = v[0];
    s.ut[i] = v[1];
  }
}

namespace {

// w = r u on nodes 1..N; index 0 of the vectors below is node 1.
struct WState {
  VectorXd w, wt;
};

double origin_value(const VectorXd& w, double h) { return (8.0 * w[0] - w[1]) / (6.0 * h); }

class Rhs {
 public:
  Rhs(const RadialGridState& s, const EvolveOptions& opt)
      : opt_(opt), h_(s.h()), n_(s.n_cells()), sf_(sign_factor(s.sign)), r_(s.r.tail(s.n_cells())) {}

  // second derivative of w at nodes 1..N-1; node N is Dirichlet
  void operator()(double t, const WState& y, WState& dy) const {
    const VectorXd& w = y.w;
    const int N = n_;
    dy.w = y.wt;
    dy.wt.resize(N);
    const double ih2 = 1.0 / (h_ * h_);
    auto W = [&](int node) -> double {  // node index, odd reflection about 0
      if (node == 0) return 0.0;
      if (node < 0) return -w[-node - 1];
      return w[node - 1];
    };
    for (int i = 1; i < N; ++i) {
      double lap;
      if (opt_.order == 4 && i < N - 1)
        lap = (-W(i + 2) + 16.0 * W(i + 1) - 30.0 * W(i) + 16.0 * W(i - 1) - W(i - 2)) * (ih2 / 12.0);
      else
        lap = (W(i + 1) - 2.0 * W(i) + W(i - 1)) * ih2;
      const double r = r_[i - 1];
      double rhs = lap;
      if (opt_.nonlinear) {
        const double u = W(i) / r;
        rhs -= sf_ * r * std::pow(u, 7);
      }
      if (opt_.source) rhs += r * opt_.source(t, r);
      dy.wt[i - 1] = rhs;
    }
    dy.wt[N - 1] = 0.0;
    dy.w[N - 1] = 0.0;  // boundary node handled by set_boundary
  }

  void set_boundary(double t, WState& y) const {
    if (!opt_.outer_u) return;
    const double R = r_[n_ - 1];
    y.w[n_ - 1] = R * opt_.outer_u(t);
    // time derivative by a centered difference of the boundary data
    const double dt = 1e-6 * std::max(1.0, std::abs(t));
    y.wt[n_ - 1] = R * (opt_.outer_u(t + dt) - opt_.outer_u(t - dt)) / (2.0 * dt);
  }

  const VectorXd& r() const { return r_; }

 private:
  const EvolveOptions& opt_;
  double h_;
  int n_;
  double sf_;
  VectorXd r_;
};

WState to_w(const RadialGridState& s) {
  const int N = s.n_cells();
  return {s.r.tail(N).cwiseProduct(s.u.tail(N)), s.r.tail(N).cwiseProduct(s.ut.tail(N))};
}

void from_w(const WState& y, RadialGridState& s) {
  const int N = s.n_cells();
  const double h = s.h();
  s.u.tail(N) = y.w.cwiseQuotient(s.r.tail(N));
  s.ut.tail(N) = y.wt.cwiseQuotient(s.r.tail(N));
  s.u[0] = origin_value(y.w, h);
  s.ut[0] = origin_value(y.wt, h);
}

double trapezoid_r2(const VectorXd& r, const VectorXd& f, double r_cut) {
  double acc = 0.0;
  const Eigen::Index n = r.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double a = r[i - 1], b = r[i];
    if (a >= r_cut) break;
    const double fa = f[i - 1] * a * a, fb = f[i] * b * b;
    if (b <= r_cut) {
      acc += 0.5 * (b - a) * (fa + fb);
    } else {
      const double th = (r_cut - a) / (b - a);
      const double fc = fa + th * (fb - fa);
      acc += 0.5 * (r_cut - a) * (fa + fc);
    }
  }
  return acc;
}

}  // namespace

VectorXd radial_derivative(const RadialGridState& s, int order) {
  const Eigen::Index n = s.r.size();
  const double h = s.h();
  VectorXd d(n);
  auto U = [&](Eigen::Index i) { return s.u[i < 0 ? -i : i]; };
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == n - 1)
      d[i] = (3.0 * s.u[i] - 4.0 * s.u[i - 1] + s.u[i - 2]) / (2.0 * h);
    else if (order == 4 && i < n - 2)
      d[i] = (-U(i + 2) + 8.0 * U(i + 1) - 8.0 * U(i - 1) + U(i - 2)) / (12.0 * h);
    else
      d[i] = (U(i + 1) - U(i - 1)) / (2.0 * h);
  }
  return d;
}

double grid_lp_norm(const VectorXd& r, const VectorXd& f, double p, double r_cut) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < r.size() && r[i] <= r_cut; ++i) m = std::max(m, std::abs(f[i]));
    return m;
  }
  const VectorXd g = f.array().abs().pow(p).matrix();
  return std::pow(4.0 * std::numbers::pi * trapezoid_r2(r, g, r_cut), 1.0 / p);
}

DiagnosticsRecord diagnostics(const RadialGridState& s) {
  const double sf = sign_factor(s.sign);
  const VectorXd ur = radial_derivative(s);
  const VectorXd dens =
      (0.5 * s.ut.array().square() + 0.5 * ur.array().square() + (sf / 8.0) * s.u.array().pow(8)).matrix();
  DiagnosticsRecord d;
  d.t = s.t;
  d.energy = 4.0 * std::numbers::pi * trapezoid_r2(s.r, dens, INFINITY);
  d.energy_inside_cone = 4.0 * std::numbers::pi * trapezoid_r2(s.r, dens, s.t);
  d.sup_u = s.u.cwiseAbs().maxCoeff();
  d.critical_proxy = grid_lp_norm(s.r, s.u, 9.0) + grid_lp_norm(s.r, s.ut, 9.0 / 4.0);
  return d;
}

Trajectory evolve(const RadialGridState& initial, const EvolveOptions& opt) {
  if (!(opt.cfl > 0.0 && opt.cfl <= 0.5)) throw ConfigError("evolve: cfl must lie in (0, 0.5]");
  if (opt.order != 2 && opt.order != 4) throw ConfigError("evolve: order must be 2 or 4");
  if (!(opt.t_end > initial.t)) throw ConfigError("evolve: t_end must exceed the initial time");
  if (!initial.u.allFinite() || !initial.ut.allFinite()) throw DomainError("evolve: initial data not finite");

  Trajectory tr;
  RadialGridState s = initial;
  Rhs rhs(s, opt);
  WState y = to_w(s);
  const double h = s.h();
  const int N = s.n_cells();

  std::vector<double> outs;
  for (double t : opt.output_times)
    if (t > initial.t && t < opt.t_end) outs.push_back(t);
  outs.push_back(opt.t_end);
  std::sort(outs.begin(), outs.end());
  std::size_t next_out = 0;

  if (std::find(opt.output_times.begin(), opt.output_times.end(), initial.t) != opt.output_times.end())
    tr.snapshots.push_back(s);
  tr.trace.push_back(diagnostics(s));
  if (opt.record_origin) tr.origin.push_back({s.t, s.u[0]});
  tr.last_good = s;

  double t = s.t;
  WState k1, k2, k3, k4, tmp;
  auto stage = [&](double tt, const WState& base, const WState& k, double c, WState& out) {
    out.w = base.w + c * k.w;
    out.wt = base.wt + c * k.wt;
    rhs.set_boundary(tt, out);
  };
  rhs.set_boundary(t, y);
  while (next_out < outs.size()) {
    double umax = 0.0;
    for (int i = 0; i < N; ++i) umax = std::max(umax, std::abs(y.w[i] / rhs.r()[i]));
    umax = std::max(umax, std::abs(origin_value(y.w, h)));
    double dt = opt.cfl * h;
    if (opt.nonlinear && umax > 0.0) dt = std::min(dt, opt.nonlinear_dt / std::pow(umax, 3));
    bool hit = false;
    if (t + dt >= outs[next_out] - 1e-14 * std::max(1.0, std::abs(t))) {
      dt = outs[next_out] - t;
      hit = true;
    }
    rhs(t, y, k1);
    stage(t + 0.5 * dt, y, k1, 0.5 * dt, tmp);
    rhs(t + 0.5 * dt, tmp, k2);
    stage(t + 0.5 * dt, y, k2, 0.5 * dt, tmp);
    rhs(t + 0.5 * dt, tmp, k3);
    stage(t + dt, y, k3, dt, tmp);
    rhs(t + dt, tmp, k4);
    WState ny;
    ny.w = y.w + (dt / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
    ny.wt = y.wt + (dt / 6.0) * (k1.wt + 2.0 * k2.wt + 2.0 * k3.wt + k4.wt);
    const double tn = hit ? outs[next_out] : t + dt;
    rhs.set_boundary(tn, ny);
    ++tr.steps;

    RadialGridState ns = s;
    ns.t = tn;
    from_w(ny, ns);
    if (!ns.u.allFinite() || !ns.ut.allFinite() || ns.u.cwiseAbs().maxCoeff() > opt.blowup_threshold) {
      tr.blew_up = true;
      tr.blowup_time = tn;
      return tr;
    }
    y = std::move(ny);
    s = std::move(ns);
    t = tn;
    tr.last_good = s;
    if (opt.record_origin) tr.origin.push_back({t, s.u[0]});
    if (hit) {
      tr.snapshots.push_back(s);
      ++next_out;
    }
    if (hit || tr.steps % std::max(1, opt.diagnostics_every) == 0) tr.trace.push_back(diagnostics(s));
  }
  return tr;
}

EnergyReport energy_report(const RadialGridState& s, const ApproxSolutionField* field) {
  const double sf = sign_factor(s.sign);
  const VectorXd ur = radial_derivative(s);
  const double fp = 4.0 * std::numbers::pi;
  EnergyReport e;
  e.kinetic = fp * trapezoid_r2(s.r, (0.5 * s.ut.array().square()).matrix(), INFINITY);
  e.gradient = fp * trapezoid_r2(s.r, (0.5 * ur.array().square()).matrix(), INFINITY);
  e.potential = fp * trapezoid_r2(s.r, ((sf / 8.0) * s.u.array().pow(8)).matrix(), INFINITY);
  e.total = e.kinetic + e.gradient + e.potential;
  if (!field) return e;
  e.has_field = true;
  RadialGridState v = s;
  VectorXd uf(s.r.size());
  for (Eigen::Index i = 0; i < s.r.size(); ++i) {
    const FieldValue f = field->eval(s.t, s.r[i]);
    uf[i] = f.u;
    v.u[i] = s.u[i] - f.u;
    v.ut[i] = s.ut[i] - f.ut;
  }
  const VectorXd vr = radial_derivative(v);
  e.v_quadratic = fp * trapezoid_r2(s.r, (0.5 * (v.ut.array().square() + vr.array().square())).matrix(), INFINITY);
  double binom = 1.0;  // C(8, k)
  for (int k = 1; k <= 8; ++k) {
    binom = binom * (8 - k + 1) / k;
    if (k < 2) continue;
    e.coupling_weight[k] = sf * binom / 8.0;
    const VectorXd g = (uf.array().pow(8 - k) * v.u.array().pow(k)).matrix();
    e.coupling[k] = e.coupling_weight[k] * fp * trapezoid_r2(s.r, g, INFINITY);
  }
  return e;
}

bool strichartz_admissible(double p, double q) {
  if (!(p > 3.0) || !(q > 0.0)) return false;
  const double lhs = (std::isinf(p) ? 0.0 : 1.0 / (3.0 * p)) + (std::isinf(q) ? 0.0 : 1.0 / q);
  return std::abs(lhs - 1.0 / 9.0) < 1e-12;
}

double strichartz_proxy(const std::vector<RadialGridState>& snaps, double p, double q) {
  if (!strichartz_admissible(p, q)) throw ConfigError("strichartz_proxy: (p, q) is not admissible");
  if (snaps.empty()) return 0.0;
  std::vector<double> nq(snaps.size());
  for (std::size_t i = 0; i < snaps.size(); ++i) nq[i] = grid_lp_norm(snaps[i].r, snaps[i].u, q);
  if (std::isinf(p)) return *std::max_element(nq.begin(), nq.end());
  double acc = 0.0;
  for (std::size_t i = 1; i < snaps.size(); ++i)
    acc += 0.5 * (snaps[i].t - snaps[i - 1].t) * (std::pow(nq[i], p) + std::pow(nq[i - 1], p));
  return std::pow(acc, 1.0 / p);
}

double cone_energy_flux(const RadialGridState& s) {
  const double t = s.t, h = s.h();
  if (!(t > 2.0 * h) || !(t < s.r_max() - 3.0 * h)) throw DomainError("cone_energy_flux: cone outside the grid");
  const VectorXd ur = radial_derivative(s);
  // cubic Lagrange interpolation on the four nodes around r = t
  const Eigen::Index i0 = static_cast<Eigen::Index>(std::floor(t / h)) - 1;
  double g = 0.0, u = 0.0;
  for (Eigen::Index j = i0; j < i0 + 4; ++j) {
    double l = 1.0;
    for (Eigen::Index k = i0; k < i0 + 4; ++k)
      if (k != j) l *= (t - s.r[k]) / (s.r[j] - s.r[k]);
    g += l * (s.ut[j] + ur[j]);
    u += l * s.u[j];
  }
  return 4.0 * std::numbers::pi * t * t * (0.5 * g * g + sign_factor(s.sign) / 8.0 * std::pow(u, 8));
}

double self_similar_energy_inside_cone(const GlobalProfile& profile, double t, int points) {
  const double sf = sign_factor(profile.sign());
  const GaussRule g = gauss_legendre01(points);
  double acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const double x = g.x[k];
    const double a = 1.0 - x * x * x;
    const Jet<double> q = profile.jet(a);
    // t^{4/3} ut = −(Q/3 + a Q'), t^{4/3} ur = Q', t^{8/3} u⁸ = Q⁸
    const double e = 0.5 * std::pow(q.value / 3.0 + a * q.d1, 2) + 0.5 * q.d1 * q.d1 + sf / 8.0 * std::pow(q.value, 8);
    acc += g.w[k] * 3.0 * x * x * e * a * a;
  }
  return 4.0 * std::numbers::pi * std::cbrt(t) * acc;
}

ConeEnergyGrowth self_similar_energy_growth(const GlobalProfile& profile, double t0, double t1, int cells_per_unit,
                                           int samples) {
  if (!(t1 > t0) || !(t0 >= 1.0) || samples < 4) throw ConfigError("self_similar_energy_growth: bad window");
  auto exact = [&profile](double t, double r) {
    const double a = r / t, tm = std::pow(t, -1.0 / 3.0);
    if (a == 1.0) {
      const double q = profile.value(1.0);
      return std::array<double, 2>{tm * q, -tm / t * q / 3.0};
    }
    const Jet<double> j = profile.jet(a);
    return std::array<double, 2>{tm * j.value, -tm / t * (j.value / 3.0 + a * j.d1)};
  };
  const double R = 2.0 * t1;
  RadialGridState s = make_grid_state(R, static_cast<int>(std::ceil(R * cells_per_unit)), t0, profile.sign());
  sample_field(s, exact);
  EvolveOptions o;
  o.t_end = t1;
  o.diagnostics_every = 1 << 30;
  o.outer_u = [&exact, R](double t) { return exact(t, R)[0]; };
  for (int k = 0; k <= samples; ++k) o.output_times.push_back(t0 + (t1 - t0) * k / samples);
  const Trajectory tr = evolve(s, o);
  if (tr.blew_up) throw Error("self_similar_energy_growth: evolution blew up");
  ConeEnergyGrowth g;
  g.cells_per_unit = cells_per_unit;
  double E = self_similar_energy_inside_cone(profile, t0);
  // the sampled data are singular at the cone node; the first flux sample is taken after one output step
  double fprev = cone_energy_flux(tr.snapshots.at(1));
  g.t.push_back(t0);
  g.energy.push_back(E);
  g.flux.push_back(fprev);
  for (std::size_t k = 1; k < tr.snapshots.size(); ++k) {
    const double f = cone_energy_flux(tr.snapshots[k]);
    E += 0.5 * (tr.snapshots[k].t - tr.snapshots[k - 1].t) * (f + fprev);
    fprev = f;
    g.t.push_back(tr.snapshots[k].t);
    g.energy.push_back(E);
    g.flux.push_back(f);
  }
  g.fit = fit_loglog(g.t, g.energy);
  return g;
}

double ode_blowup_time(double u0) {
  // T = (2/u0³) ∫_1^∞ (x⁸ − 1)^{-1/2} dx = (1/(4 u0³)) B(3/8, 1/2)
  return std::beta(3.0 / 8.0, 0.5) / (4.0 * u0 * u0 * u0);
}

PerturbReport perturb_and_evolve(const ApproxSolutionField& field, const PerturbationSpec& v0,
                                 const PerturbOptions& opt) {
  if (!(v0.delta >= 0.0) || !(v0.width > 0.0)) throw ConfigError("perturb_and_evolve: bad perturbation spec");
  const double C = field.cutoff().C;
  const double R = opt.t_end + 2.0 * C + opt.margin + v0.center + v0.width;
  const int N = static_cast<int>(std::ceil(R / opt.h));
  const Sign sign = field.profile().sign();

  RadialGridState base = make_grid_state(N * opt.h, N, opt.t0, sign);
  sample_field(base, [&](double t, double r) {
    const FieldValue f = field.eval(t, r);
    return std::array<double, 2>{f.u, f.ut};
  });
  auto bump = [&](double r) {
    const double x = (r - v0.center) / v0.width;
    return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
  };
  auto dbump = [&](double r) {
    const double x = (r - v0.center) / v0.width;
    if (std::abs(x) >= 1.0) return 0.0;
    const double q = 1.0 - x * x;
    return -2.0 * x / (q * q) * std::exp(1.0 - 1.0 / q) / v0.width;
  };
  RadialGridState shape = base;
  for (Eigen::Index i = 0; i < shape.r.size(); ++i) {
    const double r = shape.r[i];
    shape.u[i] = bump(r);
    shape.ut[i] = v0.outgoing && r > 0.0 ? -(dbump(r) + bump(r) / r) : 0.0;
  }
  const double unit = grid_lp_norm(shape.r, shape.u, 9.0) + grid_lp_norm(shape.r, shape.ut, 9.0 / 4.0);
  const double A = unit > 0.0 ? v0.delta / unit : 0.0;
  RadialGridState pert = base;
  pert.u += A * shape.u;
  pert.ut += A * shape.ut;

  EvolveOptions eo;
  eo.t_end = opt.t_end;
  eo.cfl = opt.cfl;
  eo.diagnostics_every = 1 << 30;
  const double Rmax = base.r_max();
  eo.outer_u = [&field, Rmax](double t) { return field.u(t, Rmax); };
  for (int k = 0; k < opt.samples; ++k)
    eo.output_times.push_back(opt.t0 + (opt.t_end - opt.t0) * k / (opt.samples - 1));

  const Trajectory tb = evolve(base, eo);
  const Trajectory tp = evolve(pert, eo);
  PerturbReport rep;
  rep.r_max = Rmax;
  rep.n_cells = N;
  rep.blew_up = tb.blew_up || tp.blew_up;
  const std::size_t n = std::min(tb.snapshots.size(), tp.snapshots.size());
  for (std::size_t k = 0; k < n; ++k) {
    const RadialGridState& sb = tb.snapshots[k];
    const RadialGridState& sp = tp.snapshots[k];
    RadialGridState vt = sp, vr = sp;
    for (Eigen::Index i = 0; i < sp.r.size(); ++i) {
      const FieldValue f = field.eval(sp.t, sp.r[i]);
      vt.u[i] = sp.u[i] - f.u;
      vt.ut[i] = sp.ut[i] - f.ut;
    }
    vr.u = sp.u - sb.u;
    vr.ut = sp.ut - sb.ut;
    rep.t.push_back(sp.t);
    rep.proxy_total.push_back(grid_lp_norm(vt.r, vt.u, 9.0) + grid_lp_norm(vt.r, vt.ut, 9.0 / 4.0));
    rep.proxy_relative.push_back(grid_lp_norm(vr.r, vr.u, 9.0) + grid_lp_norm(vr.r, vr.ut, 9.0 / 4.0));
    const VectorXd dvr = radial_derivative(vr);
    rep.v_energy.push_back(4.0 * std::numbers::pi *
                           trapezoid_r2(vr.r, (0.5 * (vr.ut.array().square() + dvr.array().square())).matrix(),
                                        INFINITY));
  }
  rep.initial_proxy = rep.proxy_relative.empty() ? 0.0 : rep.proxy_relative.front();
  for (std::size_t k = 0; k < rep.t.size(); ++k) {
    if (rep.initial_proxy > 0.0) {
      rep.max_ratio_total = std::max(rep.max_ratio_total, rep.proxy_total[k] / rep.initial_proxy);
      rep.max_ratio_relative = std::max(rep.max_ratio_relative, rep.proxy_relative[k] / rep.initial_proxy);
    }
  }
  return rep;
}

}  // namespace selfsim
