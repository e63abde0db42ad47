#include "selfsim/regularization.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "selfsim/errors.hpp"
#include "selfsim/quadrature.hpp"
#include "selfsim/radial_norms.hpp"

namespace selfsim {

namespace {

// g(x) = exp(-1/x) and its first two derivatives
struct G3 {
  double g = 0, g1 = 0, g2 = 0;
};

G3 g_jet(double x) {
  if (!(x > 0.0)) return {};
  const double e = std::exp(-1.0 / x);
  const double x2 = x * x;
  return {e, e / x2, e * (1.0 - 2.0 * x) / (x2 * x2)};
}

// S(x) = g(x) / (g(x) + g(1-x)) on [0,1] with derivatives
std::array<double, 3> smoothstep(double x) {
  if (x <= 0.0) return {0.0, 0.0, 0.0};
  if (x >= 1.0) return {1.0, 0.0, 0.0};
  const G3 a = g_jet(x);
  const G3 b0 = g_jet(1.0 - x);
  const G3 b{b0.g, -b0.g1, b0.g2};  // derivatives of g(1-x) in x
  const double D = a.g + b.g, D1 = a.g1 + b.g1, D2 = a.g2 + b.g2;
  const double S = a.g / D;
  const double S1 = (a.g1 - S * D1) / D;
  const double S2 = (a.g2 - 2.0 * S1 * D1 - S * D2) / D;
  return {S, S1, S2};
}

int sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace

double chi(double v, const CutoffSpec& spec, int deriv_order) {
  if (deriv_order < 0 || deriv_order > 2) throw Error("chi: deriv_order must be 0, 1 or 2");
  const double C = spec.C;
  const auto s = smoothstep((std::abs(v) - C) / C);
  if (deriv_order == 0) return s[0];
  if (deriv_order == 1) return sgn(v) * s[1] / C;
  return s[2] / (C * C);
}

ApproxSolutionField::ApproxSolutionField(GlobalProfile profile, CutoffSpec cutoff)
    : profile_(std::move(profile)), cutoff_(cutoff) {
  if (!(cutoff_.C > 0.0)) throw ConfigError("cutoff C must be positive");
  if (!profile_.has_far_field()) throw Error("build_approx: profile has no far-field piece");
  q2_ = profile_.cone_value_left();
}

ApproxSolutionField build_approx(GlobalProfile profile, CutoffSpec spec) {
  return ApproxSolutionField(std::move(profile), spec);
}

double ApproxSolutionField::u(double t, double r) const { return eval(t, r).u; }

FieldValue ApproxSolutionField::eval(double t, double r) const {
  const double tm13 = std::pow(t, -1.0 / 3.0);
  const double v = t - r;
  FieldValue out;
  if (std::abs(v) <= cutoff_.C) {
    // χ and χ' vanish: only the constant cone part survives
    out.u = tm13 * q2_;
    out.ut = -(1.0 / 3.0) * tm13 / t * q2_;
    return out;
  }
  const double a = r / t;
  const double c = chi(v, cutoff_, 0), c1 = chi(v, cutoff_, 1);
  const Jet<double> q = profile_.jet(a);
  const double Y = q.value - q2_, dY = q.d1;
  out.u = tm13 * (c * Y + q2_);
  out.ut = -(1.0 / 3.0) * tm13 / t * (c * Y + q2_) + tm13 * (c1 * Y - c * dY * r / (t * t));
  out.ur = tm13 * (-c1 * Y + c * dY / t);
  return out;
}

double ApproxSolutionField::Q3_tilde(double a) const {
  const SingularExpansion* e = profile_.expansion_at(a);
  if (!e || a == 1.0) throw DomainError("Q3_tilde: a is not inside a near-cone piece");
  const auto cv = e->components(a);
  const double d = std::abs(1.0 - a);
  const int p = e->exponents_thirds()[2];
  return std::pow(d, (p - 3) / 3.0) * cv.v[2] + (cv.v[1] - q2_) / d;
}

double ApproxSolutionField::X(double a) const {
  const double d = std::abs(1.0 - a);
  if (d == 0.0) throw DomainError("X: evaluated at the cone");
  if (const SingularExpansion* e = profile_.expansion_at(a)) {
    const auto cv = e->components(a);
    return cv.v[0] + std::cbrt(d) * Q3_tilde(a);
  }
  return (profile_.value(a) - q2_) / std::pow(d, 2.0 / 3.0);
}

double ApproxSolutionField::weighted_dX_components(double a) const {
  const SingularExpansion* e = profile_.expansion_at(a);
  if (!e || a == 1.0) throw DomainError("weighted_dX_components: a is not inside a near-cone piece");
  const auto cv = e->components(a);
  const double d = std::abs(1.0 - a);
  const double s = sgn(1.0 - a);
  const int p = e->exponents_thirds()[2];
  const double k = (p - 3) / 3.0;
  const double q3t = std::pow(d, k) * cv.v[2] + (cv.v[1] - q2_) / d;
  const double dq3t = -s * k * std::pow(d, k - 1.0) * cv.v[2] + std::pow(d, k) * cv.d1[2] + cv.d1[1] / d +
                      s * (cv.v[1] - q2_) / (d * d);
  return std::pow(d, 2.0 / 3.0) * cv.d1[0] + d * dq3t - s * q3t / 3.0;
}

double ApproxSolutionField::weighted_dX_direct(double a) const {
  const double d = std::abs(1.0 - a);
  if (d == 0.0) throw DomainError("weighted_dX_direct: evaluated at the cone");
  const Jet<double> q = profile_.jet(a);
  return q.d1 + (2.0 / 3.0) * sgn(1.0 - a) * (q.value - q2_) / d;
}

E3Check e3_identity_check(double t, double r, const CutoffSpec& spec) {
  const double v = t - r;
  E3Check out;
  const double c1 = chi(v, spec, 1);
  if (c1 == 0.0) return out;
  const double a = r / t;
  const double d = std::abs(1.0 - a);
  const double s = sgn(1.0 - a);
  const double tm13 = std::pow(t, -1.0 / 3.0);
  const double d23 = std::pow(d, 2.0 / 3.0), dm13 = std::pow(d, -1.0 / 3.0);
  const double t1 = 2.0 * (1.0 / 3.0) * tm13 / t * d23 * c1;
  const double t2 = -2.0 * (2.0 / 3.0) * (r / (t * t)) * s * dm13 * c1 * tm13;
  const double t3 = 2.0 * (2.0 / 3.0) * (1.0 / t) * s * dm13 * c1 * tm13;
  const double t4 = -(2.0 / r) * tm13 * d23 * c1;
  out.lhs = t1 + t2 + t3 + t4;
  out.rhs = -2.0 * v * std::pow(std::abs(v), 2.0 / 3.0) * c1 / (r * t * t);
  out.difference = out.lhs - out.rhs;
  return out;
}

ErrorFields error_fields(const ApproxSolutionField& field, double t, double r) {
  if (!(t >= 1.0) || !(r > 0.0)) throw DomainError("error_fields: need t >= 1 and r > 0");
  const CutoffSpec& spec = field.cutoff();
  const double v = t - r;
  const double q2 = field.cone_value();
  const double s = sign_factor(field.profile().sign());
  const double t73 = std::pow(t, -7.0 / 3.0);
  ErrorFields e;
  if (std::abs(v) >= 2.0 * spec.C) return e;
  if (std::abs(v) <= spec.C) {
    // χ = χ' = 0: e1 at full strength, e2 = -s t^{-7/3} q2^7, e3 = 0
    e.branch = StripBranch::center_plateau;
    e.e1 = -(4.0 / 9.0) * q2 * t73;
    e.e2 = -s * t73 * std::pow(q2, 7);
    return e;
  }
  e.branch = StripBranch::transition;
  const double a = r / t;
  const double c = chi(v, spec, 0), c1 = chi(v, spec, 1);
  const Jet<double> q = field.profile().jet(a);
  const double Y = q.value - q2;
  e.e1 = -(1.0 - c) * (4.0 / 9.0) * q2 * t73;
  e.e2 = s * t73 * (c * std::pow(Y + q2, 7) - std::pow(c * Y + q2, 7));
  const double tm13 = std::pow(t, -1.0 / 3.0);
  e.e3 = -c1 * ((2.0 / r) * tm13 * Y - (2.0 / 3.0) * tm13 / t * Y + 2.0 * tm13 / t * (1.0 - a) * q.d1);
  const double Xa = field.X(a);
  e.e3_undifferentiated = -2.0 * v * std::pow(std::abs(v), 2.0 / 3.0) * c1 * Xa / (r * t * t);
  e.e3_derivative = 2.0 * t73 * (r - t) * field.weighted_dX_direct(a) * c1;
  return e;
}

StripNorms strip_norms(const std::function<double(double, double)>& e, double t, double C, int points_per_panel) {
  std::vector<double> br;
  for (double k : {-2.0, -1.0, 0.0, 1.0, 2.0}) br.push_back(std::max(0.0, t + k * C));
  auto f = [&](double r) { return r > 0.0 ? e(t, r) : 0.0; };
  StripNorms n;
  n.l2 = radial_lp_norm(f, br, 2.0, points_per_panel);
  n.sup = radial_lp_norm(f, br, INFINITY, points_per_panel);
  return n;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& values) {
  DecayFit d;
  d.fit = fit_loglog(t, values);
  d.t_lo = t.front();
  d.t_hi = t.back();
  return d;
}

ErrorDecayReport error_decay_report(const ApproxSolutionField& field, const std::vector<double>& t_list, int threads,
                                    int points_per_panel) {
  if (t_list.size() < 3) throw FitError("error_decay_report: need at least 3 times");
  if (!(t_list.back() / t_list.front() >= std::pow(10.0, 1.5)))
    throw FitError("error_decay_report: t_list must span at least 1.5 decades");
  const std::size_t n = t_list.size();
  ErrorDecayReport rep;
  rep.t = t_list;
  for (int j = 0; j < 3; ++j) {
    rep.l2[j].assign(n, 0.0);
    rep.sup[j].assign(n, 0.0);
  }
  auto work = [&](std::size_t i) {
    const double t = t_list[i];
    for (int j = 0; j < 3; ++j) {
      auto ej = [&field, j](double tt, double r) {
        const ErrorFields e = error_fields(field, tt, r);
        return j == 0 ? e.e1 : (j == 1 ? e.e2 : e.e3);
      };
      const StripNorms sn = strip_norms(ej, t, field.cutoff().C, points_per_panel);
      rep.l2[j][i] = sn.l2;
      rep.sup[j][i] = sn.sup;
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int w = 0; w < nt; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(nt)) work(i);
    });
  for (auto& th : pool) th.join();
  for (int j = 0; j < 3; ++j) {
    rep.l2_fit[j] = fit_decay(t_list, rep.l2[j]);
    rep.sup_fit[j] = fit_decay(t_list, rep.sup[j]);
    rep.l1_integrable[j] = rep.l2_fit[j].fit.slope < -1.0;
  }
  return rep;
}

double field_lq_norm(const ApproxSolutionField& field, double t, double q) {
  // integrate in a = r/t: ∫|u|^q r^2 dr = t^{3 - q/3} ∫ |χ Y + q2|^q a^2 da
  const double C = field.cutoff().C;
  std::vector<double> br{0.0};
  for (double k : {-2.0, -1.0, 1.0, 2.0}) {
    const double a = 1.0 + k * C / t;
    if (a > br.back()) br.push_back(a);
  }
  for (double a = std::max(2.0, br.back() * 2.0); a <= 1e6; a *= 2.0) br.push_back(a);
  auto g = [&](double a) { return std::pow(t, 1.0 / 3.0) * field.u(t, a * t); };
  const double I = radial_lp_integral(g, br, q, 24);
  // tail beyond 1e6 with |t^{1/3} u| ~ |R(0)| a^{-1/3}
  const double R0 = field.profile().params().coeff_one_third;
  const double tail = q / 3.0 > 3.0 ? std::pow(std::abs(R0), q) * std::pow(1e6, 3.0 - q / 3.0) / (q / 3.0 - 3.0) : 0.0;
  return std::pow(4.0 * std::numbers::pi * std::pow(t, 3.0 - q / 3.0) * (I + tail), 1.0 / q);
}

double field_strichartz_window(const ApproxSolutionField& field, double T, double p, double q, int t_points) {
  const GaussRule g = gauss_legendre01(t_points);
  double acc = 0.0;
  for (int k = 0; k < t_points; ++k) acc += g.w[k] * std::pow(field_lq_norm(field, T + g.x[k], q), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace selfsim
