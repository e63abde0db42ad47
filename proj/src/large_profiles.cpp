#include "selfsim/large_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "selfsim/errors.hpp"
#include "selfsim/newton.hpp"

namespace selfsim {

namespace {

void require_defocusing(Sign sign, const char* where) {
  if (sign != Sign::defocusing)
    throw DomainError(std::string(where) + ": the large-data construction is defocusing only");
}

}  // namespace

LargeNearConeResult large_near_cone(double qt1, double qt2, double c, const LargeOptions& opt) {
  if (!(qt1 > 0)) throw DomainError("large_near_cone: q̃1 must be positive");
  if (opt.require_large && qt1 < 1.0) throw DomainError("large_near_cone: q̃1 < 1 is outside the large regime");
  if (std::abs(qt2) >= opt.eps_small) throw DomainError("large_near_cone: |q̃2| must be below eps_small");
  if (!(c > 0) || c > opt.c_max) throw DomainError("large_near_cone: c outside (0, c_max]; reduce c");
  const double ell = c * std::abs(qt2) * std::pow(qt1, -4.0 / 3.0);
  if (!(ell > 0)) throw DomainError("large_near_cone: degenerate interval, ℓ = c|q̃2|q̃1^{-4/3} = 0");
  NearConeProblem pb;
  pb.side = ConeSide::right_of_cone;
  pb.length = ell;
  pb.c1 = qt1;
  pb.c2 = qt2;
  pb.sign = Sign::defocusing;
  pb.p3_thirds = 4;
  pb.degree = opt.degree;
  pb.quad_points = opt.quad_points;
  pb.tol = opt.tol;
  pb.max_iter = opt.max_iter;
  LargeNearConeResult r;
  try {
    r.expansion = solve_near_cone(pb);
  } catch (const ContractionFailure& e) {
    throw ContractionFailure(std::string(e.what()) + "; reduce c", e.iterations(), e.last_increment());
  }
  r.expansion.provenance().construction = "large_near_cone";
  r.expansion.provenance().params["c"] = c;
  r.expansion.provenance().params["ell"] = ell;
  r.qt1 = qt1;
  r.qt2 = qt2;
  r.ell = ell;
  r.c = c;
  r.a_star = 1.0 + ell / 2.0;
  const double qs = r.expansion.value(r.a_star);
  r.amplitude_at_star = std::abs(qs);
  r.singular_amplitude_at_star = std::abs(qs - r.expansion.components(r.a_star).v[1]);
  double mn = INFINITY, b2 = 0, b3 = 0;
  for (int k = 0; k <= 200; ++k) {
    const double a = k == 200 ? r.expansion.hi() : 1.0 + ell * k / 200.0;
    const auto cv = r.expansion.components(a);
    mn = std::min(mn, std::abs(cv.v[0]) / qt1);
    if (qt2 != 0) b2 = std::max(b2, std::abs(cv.v[1]) / std::abs(qt2));
    b3 = std::max(b3, std::abs(cv.v[2]) / qt1);
  }
  r.min_q1_over_qt1 = mn;
  r.bound_c2 = b2;
  r.bound_c3 = b3;
  return r;
}

IntegratingFactor integrating_factor(double a, double ell) {
  if (!(ell > 0) || !(a >= 1.0 + ell)) {
    std::ostringstream os;
    os.precision(17);
    os << "integrating_factor: need ell > 0 and a >= 1 + ell (a = " << a << ", ell = " << ell << ")";
    throw DomainError(os.str());
  }
  const double am1 = a - 1.0, ap1 = a + 1.0, a21 = am1 * ap1;
  IntegratingFactor r;
  r.f = 1.0 / a + (1.0 / am1 + 1.0 / ap1) / 6.0;
  r.g = 5.0 / (9.0 * a21 * a21);
  r.w = (a / (1.0 + ell)) * std::pow(a21 / (ell * (2.0 + ell)), 1.0 / 6.0);
  return r;
}

double nonlinear_weight(double a, double ell) {
  const IntegratingFactor i = integrating_factor(a, ell);
  const double w2 = i.w * i.w;
  return 1.0 / (w2 * w2 * w2 * (a - 1.0) * (a + 1.0));
}

double energy_functional(const ExtensionState& s, double a, double ell) {
  const IntegratingFactor i = integrating_factor(a, ell);
  const double x2 = s.x * s.x, x8 = x2 * x2 * x2 * x2;
  return 0.5 * s.dx * s.dx + 0.5 * i.g * x2 + nonlinear_weight(a, ell) * x8 / 8.0;
}

ExtensionState make_extension_state(double a, double q, double dq, double ell) {
  const IntegratingFactor i = integrating_factor(a, ell);
  ExtensionState s;
  s.a = a;
  s.w = i.w;
  s.f = i.f;
  s.g = i.g;
  s.x = q * i.w;
  s.dx = i.w * (dq + i.f * q);
  s.energy = energy_functional(s, a, ell);
  return s;
}

OdeState ExtensionResult::state(double a) const {
  const Eigen::Vector2d y = trajectory(a);
  const IntegratingFactor i = integrating_factor(a, ell);
  const double q = y[0] / i.w;
  return {a, q, y[1] / i.w - i.f * q};
}

double ExtensionResult::q_bound(double a) const {
  const IntegratingFactor i = integrating_factor(a, ell);
  return std::pow(8.0 * initial_energy, 0.125) * std::pow(i.w, -0.25) * std::pow((a - 1.0) * (a + 1.0), 0.125);
}

ExtensionResult extend_defocusing(const OdeState& boundary, double ell, double a_far, Sign sign,
                                  const ExtensionOptions& opt) {
  require_defocusing(sign, "extend_defocusing");
  if (!(ell > 0)) throw DomainError("extend_defocusing: ℓ must be positive");
  if (std::abs(boundary.a - (1.0 + ell)) > 1e-14 * (1.0 + ell))
    throw DomainError("extend_defocusing: boundary state must sit at a = 1 + ℓ");
  if (!(a_far > boundary.a)) throw DomainError("extend_defocusing: a_far must exceed 1 + ℓ");
  const double a0 = 1.0 + ell;
  ExtensionResult r;
  r.ell = ell;
  r.a_start = a0;
  r.a_end = a_far;
  const ExtensionState s0 = make_extension_state(a0, boundary.q, boundary.dq, ell);
  r.initial_energy = s0.energy;
  r.trace.push_back(s0);
  auto rhs = [ell](double a, const Eigen::Vector2d& y) {
    const IntegratingFactor i = integrating_factor(std::max(a, 1.0 + ell), ell);
    const double x = y[0], x2 = x * x, x7 = x2 * x2 * x2 * x;
    return Eigen::Vector2d(y[1], -i.g * x - nonlinear_weight(std::max(a, 1.0 + ell), ell) * x7);
  };
  double running_min = s0.energy, worst = 0.0;
  double prev_x = s0.x;
  auto observer = [&](double a, const Eigen::Vector2d& y) {
    ExtensionState s;
    s.a = a;
    const IntegratingFactor i = integrating_factor(a, ell);
    s.w = i.w;
    s.f = i.f;
    s.g = i.g;
    s.x = y[0];
    s.dx = y[1];
    s.energy = energy_functional(s, a, ell);
    if (s.energy > running_min) worst = std::max(worst, s.energy - running_min);
    running_min = std::min(running_min, s.energy);
    if (s.x * prev_x < 0) ++r.zero_crossings;
    if (s.x != 0) prev_x = s.x;
    r.trace.push_back(s);
    return true;
  };
  DopriOptions dop;
  dop.rtol = opt.rtol;
  dop.atol = opt.atol;
  dop.initial_step = 1e-3 * ell;
  r.trajectory = dopri5<2>(rhs, a0, Eigen::Vector2d(s0.x, s0.dx), a_far, dop, observer);
  r.max_energy_increase_rel = s0.energy > 0 ? worst / s0.energy : 0.0;
  const double allowed = opt.energy_drift_rel * (1.0 + std::log(a_far / a0));
  if (r.max_energy_increase_rel > allowed) {
    std::ostringstream os;
    os << "extend_defocusing: integrator failure, energy increased by " << r.max_energy_increase_rel
       << " (relative) beyond the drift allowance " << allowed;
    throw Error(os.str());
  }
  double viol = -INFINITY, dmax = 0.0;
  for (const auto& s : r.trace) {
    if (s.a <= a0) continue;
    const double bound = std::pow(8.0 * s0.energy * std::pow(s.w, 6) * (s.a - 1.0) * (s.a + 1.0), 0.125);
    if (bound > 0) viol = std::max(viol, std::abs(s.x) / bound - 1.0);
    dmax = std::max(dmax, bound / std::pow(s.a, 1.25));
  }
  r.a_priori_violation = std::isfinite(viol) ? viol : 0.0;
  r.x_growth_constant = dmax;
  if (opt.build_profile) {
    std::vector<double> breaks{a0};
    for (double d = 2.0 * ell; 1.0 + d < a_far; d *= 2.0) breaks.push_back(1.0 + d);
    breaks.push_back(a_far);
    Provenance prov;
    prov.construction = "extend_defocusing";
    prov.params = {{"ell", ell}, {"a_far", a_far}, {"rtol", opt.rtol}, {"initial_energy", s0.energy}};
    const ExtensionResult* self = &r;
    r.profile = SampledProfile::adaptive(
        [self](double a) {
          const OdeState st = self->state(a);
          const double ddq = profile_rhs(a, Eigen::Vector2d(st.q, st.dq), Sign::defocusing)[1];
          return Jet<double>{st.q, st.dq, ddq};
        },
        breaks, opt.profile_degree, opt.profile_tol, std::move(prov));
  }
  return r;
}

RematchResult rematch_far(const OdeState& state, Sign sign, double a_max, const FarFieldOptions& opt) {
  if (!(state.a > 1.0)) throw DomainError("rematch_far: anchor must exceed 1");
  if (!(a_max > state.a)) throw DomainError("rematch_far: A_max must exceed the anchor");
  FarFieldOptions fo = opt;
  fo.enforce_eps_small = false;
  const FundamentalPair pair{Region::exterior};
  const auto p1 = pair.jet(Branch::first, state.a);
  const auto p2 = pair.jet(Branch::second, state.a);
  Eigen::Matrix2d j0;
  j0 << p1.value, p2.value, p1.d1, p2.d1;
  const Eigen::Vector2d x0 = j0.fullPivLu().solve(Eigen::Vector2d(state.q, state.dq));
  auto residual = [&](const Eigen::Vector2d& m) -> Eigen::Vector2d {
    const FarField ff = solve_far_field(m[0], m[1], sign, state.a, fo);
    const auto j = ff.jet(state.a);
    return Eigen::Vector2d(j.value - state.q, j.d1 - state.dq);
  };
  Newton2Options no;
  no.tol = 1e-15 * std::max(1.0, std::abs(state.q) + std::abs(state.dq));
  no.accept = 1e-10;
  const Newton2Result nr = newton2(residual, x0, j0, no);
  RematchResult r;
  r.a_eps = state.a;
  r.m1 = nr.x[0];
  r.m2 = nr.x[1];
  r.newton_residual = nr.residual_norm;
  r.tail = solve_far_field(r.m1, r.m2, sign, state.a, fo);
  return r;
}

RematchResult find_and_rematch(const ExtensionResult& ext, Sign sign, double eps_small, double a_cap,
                               int points_per_decade) {
  std::vector<std::pair<double, double>> trace;
  const double top = std::min(a_cap, ext.a_end / 2.0);
  const int n = static_cast<int>(std::ceil(points_per_decade * std::log10(top / ext.a_start)));
  std::string last_error;
  for (int k = 1; k <= n; ++k) {
    const double a = ext.a_start * std::pow(10.0, static_cast<double>(k) / points_per_decade);
    if (a > top) break;
    const OdeState st = ext.state(a);
    const double size = std::abs(st.q) + std::abs(st.dq);
    trace.emplace_back(a, size);
    if (!(size < eps_small / 2.0)) continue;
    try {
      RematchResult r = rematch_far(st, sign, 2.0 * a);
      double err = 0.0;
      for (int i = 0; i <= 64; ++i) {
        const double b = a * (1.0 + i / 64.0);
        err = std::max(err, std::abs(r.tail.value(b) - ext.state(b).q));
      }
      r.overlap_error = err;
      r.smallness_trace = std::move(trace);
      return r;
    } catch (const Error& e) {
      last_error = e.what();  // keep scanning: a larger anchor contracts better
    }
  }
  std::ostringstream os;
  os << "find_and_rematch: no admissible a_eps below " << top << " (|Q|+|Q'| < " << eps_small / 2.0 << ")";
  if (!last_error.empty()) os << "; last rematch error: " << last_error;
  if (!trace.empty()) os << "; smallest |Q|+|Q'| seen " << std::min_element(trace.begin(), trace.end(), [](auto& x, auto& y) {
                              return x.second < y.second;
                            })->second;
  throw Error(os.str());
}

LargeGlueResult glue_large_global(double q0, double qt1, Sign sign, const LargeGlueOptions& opt) {
  require_defocusing(sign, "glue_large_global");
  LargeGlueResult out;
  InteriorMatch im;
  try {
    im = match_at_half(q0, sign, opt.interior);
  } catch (const Error& e) {
    throw StageError("match_at_half", e.what());
  }
  const double c = std::isnan(opt.c) ? calibrated_c_max() / 2.0 : opt.c;
  try {
    out.near = large_near_cone(qt1, im.q2, c, opt.near);
  } catch (const Error& e) {
    throw StageError("large_near_cone", e.what());
  }
  const double a0 = 1.0 + out.near.ell;
  const auto jb = out.near.expansion.jet(a0);
  try {
    out.extension = extend_defocusing(OdeState{a0, jb.value, jb.d1}, out.near.ell, opt.a_cap, sign, opt.extension);
  } catch (const Error& e) {
    throw StageError("extend_defocusing", e.what());
  }
  try {
    out.rematch = find_and_rematch(out.extension, sign, opt.eps_small, opt.a_cap);
  } catch (const Error& e) {
    throw StageError("rematch_far", e.what());
  }
  GlueParams gp;
  gp.q0 = q0;
  gp.q1 = im.q1;
  gp.q2 = im.q2;
  gp.qt1 = qt1;
  gp.qt2 = im.q2;
  gp.m1 = out.rematch.m1;
  gp.m2 = out.rematch.m2;
  gp.ell = out.near.ell;
  gp.newton_residual_half = im.newton_residual;
  gp.newton_residual_two = out.rematch.newton_residual;
  gp.coeff_one_third = out.rematch.tail.coefficient_one_third();
  gp.coeff_four_thirds = out.rematch.tail.coefficient_four_thirds();
  std::vector<GlobalPiece> pieces;
  pieces.push_back({0.0, 0.5, "interior", im.inner});
  pieces.push_back({0.5, 1.0, "near_cone_left", im.outer});
  pieces.push_back({1.0, a0, "large_near_cone", out.near.expansion});
  pieces.push_back({a0, out.rematch.a_eps, "extension", out.extension.profile});
  pieces.push_back({out.rematch.a_eps, INFINITY, "far_field", out.rematch.tail});
  out.profile = GlobalProfile(std::move(pieces), gp, sign, DecayClass::generic_a_minus_one_third);
  return out;
}

AmplitudeSweep sweep_amplitude_exponent(const std::vector<double>& qt1, double qt2, double c, int threads) {
  AmplitudeSweep sw;
  sw.qt1 = qt1;
  sw.qt2 = qt2;
  sw.c = c;
  const std::size_t n = qt1.size();
  sw.amplitude.assign(n, 0.0);
  sw.singular_amplitude.assign(n, 0.0);
  std::vector<std::string> errors(n);
  auto work = [&](std::size_t i) {
    try {
      const LargeNearConeResult r = large_near_cone(qt1[i], qt2, c);
      sw.amplitude[i] = r.amplitude_at_star;
      sw.singular_amplitude[i] = r.singular_amplitude_at_star;
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nt == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = static_cast<std::size_t>(t); i < n; i += static_cast<std::size_t>(nt)) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) throw StageError("sweep_amplitude_exponent", errors[i]);
  sw.beta_total = fit_loglog(sw.qt1, sw.amplitude);
  sw.beta_singular = fit_loglog(sw.qt1, sw.singular_amplitude);
  return sw;
}

double calibrate_c_max(const std::vector<double>& qt1_grid, const std::vector<double>& qt2_grid, double c_lo,
                       double c_hi, int steps) {
  auto ok = [&](double c) {
    for (double q1 : qt1_grid)
      for (double q2 : qt2_grid) {
        if (c * std::abs(q2) * std::pow(q1, -4.0 / 3.0) > 1.0) continue;
        try {
          large_near_cone(q1, q2, c);
        } catch (const ContractionFailure&) {
          return false;
        }
      }
    return true;
  };
  if (ok(c_hi)) return c_hi;
  if (!ok(c_lo)) throw Error("calibrate_c_max: no contraction even at the lower bracket");
  double lo = std::log(c_lo), hi = std::log(c_hi);
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(std::exp(mid)) ? lo : hi) = mid;
  }
  return std::exp(lo);
}

double calibrated_c_max() {
  static std::once_flag once;
  static double value = 0.0;
  std::call_once(once, [] { value = calibrate_c_max({1.0, 10.0, 100.0, 1000.0}, {0.01, 0.1}); });
  return value;
}

}  // namespace selfsim
