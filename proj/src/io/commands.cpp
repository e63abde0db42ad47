#include "selfsim/io/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "selfsim/errors.hpp"
#include "selfsim/exterior.hpp"
#include "selfsim/io/csv.hpp"
#include "selfsim/io/report.hpp"
#include "selfsim/large_profiles.hpp"
#include "selfsim/regularization.hpp"
#include "selfsim/wave_sim.hpp"

namespace selfsim::io {

namespace {

using Rows = std::vector<std::vector<double>>;

const std::vector<std::string> kCommands{"profile-interior", "profile-exterior", "glue",    "glue-large",
                                         "regularize",       "errors",           "evolve",  "perturb",
                                         "sweep-exponent",   "calibrate",        "report"};

std::string file_stem(const std::string& command) {
  std::string s = command;
  for (char& c : s)
    if (c == '-') c = '_';
  return s;
}

template <class Piece>
void append_rows(Rows& rows, const Piece& p, const std::vector<double>& as) {
  for (double a : as) {
    const Jet<double> j = p.jet(a);
    rows.push_back({a, j.value, j.d1});
  }
}

std::vector<double> linspace(double lo, double hi, int n, bool include_hi = true) {
  std::vector<double> x;
  const int m = include_hi ? n - 1 : n;
  for (int k = 0; k < n; ++k) x.push_back(lo + (hi - lo) * k / m);
  return x;
}

// a-grid on [0, a_max] avoiding a = 1 where Q' is singular
std::vector<double> profile_grid(double a_max, int points) {
  std::vector<double> a = linspace(0.0, 1.0 - 1e-6, points / 3);
  for (double x : linspace(1.0 + 1e-6, 2.0, points / 3, false)) a.push_back(x);
  for (double x : logspace(2.0, a_max, points - 2 * (points / 3))) a.push_back(x);
  return a;
}

Rows profile_rows(const GlobalProfile& g, double a_max, int points) {
  Rows rows;
  for (double a : profile_grid(a_max, points)) {
    const Jet<double> j = g.jet(a);
    rows.push_back({a, j.value, j.d1});
  }
  return rows;
}

void report_glue(RunReport& rep, const GlobalProfile& g) {
  const GlueParams& p = g.params();
  rep.resolved("q0", p.q0);
  rep.resolved("q1", p.q1);
  rep.resolved("q2", p.q2);
  rep.resolved("qt1", p.qt1);
  rep.resolved("qt2", p.qt2);
  rep.resolved("m1", p.m1);
  rep.resolved("m2", p.m2);
  rep.resolved("coeff_one_third", p.coeff_one_third);
  rep.resolved("coeff_four_thirds", p.coeff_four_thirds);
  rep.resolved("decay_class", std::string(to_string(g.decay_class())));
  if (p.ell) rep.resolved("ell", *p.ell);
  double jump = 0.0;
  for (const auto& [a, j] : g.interface_jumps()) jump = std::max({jump, j[0], j[1]});
  rep.check("newton_residual_half", p.newton_residual_half, 1e-10);
  rep.check("newton_residual_two", p.newton_residual_two, 1e-10);
  rep.check("continuity_residual", jump, 1e-9);
}

void report_exponents(RunReport& rep, const GlobalProfile& g) {
  auto f = [&g](double a) { return g.value(a); };
  for (ConeSide side : {ConeSide::left_of_cone, ConeSide::right_of_cone}) {
    const double qc = side == ConeSide::left_of_cone ? g.cone_value_left() : g.cone_value_right();
    const ExponentFit e = fit_singular_exponent(f, qc, side, 1e-6, 1e-2);
    const std::string name = side == ConeSide::left_of_cone ? "cone_exponent_left" : "cone_exponent_right";
    rep.fit(name, e.exponent, e.ci95_half, e.window_lo, e.window_hi, e.residual);
  }
}

DecayClass parse_decay(const std::string& s) {
  if (s == "generic") return DecayClass::generic_a_minus_one_third;
  if (s == "tuned") return DecayClass::tuned_a_minus_four_thirds;
  throw ConfigError("decay", "expected \"generic\" or \"tuned\"");
}

GlobalProfile glue_from(const RunConfig& c) {
  GlueOptions go;
  go.a_max = c.number("a_max", 1e4);
  if (c.has("qt1")) go.qt1 = c.number("qt1");
  go.decay = parse_decay(c.text("decay", "generic"));
  return glue_global(c.number("q0"), c.sign, go);
}

LargeGlueResult glue_large_from(const RunConfig& c) {
  LargeGlueOptions lo;
  if (c.has("c")) lo.c = c.number("c");
  return glue_large_global(c.number("q0"), c.number("qt1"), c.sign, lo);
}

// profile for field-based commands: "large": true selects the large-q̃1 glue
GlobalProfile field_profile(const RunConfig& c) {
  if (c.has("large") && c.raw.at("large").is_boolean() && c.raw.at("large").get<bool>())
    return glue_large_from(c).profile;
  return glue_from(c);
}

int cmd_profile_interior(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const InteriorMatch im = match_at_half(c.number("q0"), c.sign);
  const int n = c.integer("points", 401);
  Rows rows;
  append_rows(rows, im.inner, linspace(0.0, 0.5, n / 2, false));
  append_rows(rows, im.outer, linspace(0.5, 1.0 - 1e-6, n - n / 2));
  write_csv(o.out / "profile_interior.csv", {"a", "Q", "dQ"}, rows);
  rep.artifact("profile_interior.csv");
  rep.resolved("q1", im.q1);
  rep.resolved("q2", im.q2);
  rep.resolved("newton_iterations", im.newton_iterations);
  rep.check("newton_residual_half", im.newton_residual, 1e-10);
  const ExponentFit e = fit_singular_exponent([&](double a) { return im.outer.value(a); }, im.q2,
                                              ConeSide::left_of_cone, 1e-6, 1e-2);
  rep.fit("cone_exponent_left", e.exponent, e.ci95_half, e.window_lo, e.window_hi, e.residual);
  return 0;
}

int cmd_profile_exterior(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const double a_max = c.number("a_max", 1e4);
  const ExteriorMatch em = match_at_two(c.number("qt1"), c.number("qt2"), c.sign, a_max);
  const int n = c.integer("points", 401);
  Rows rows;
  append_rows(rows, em.near, linspace(1.0 + 1e-6, 2.0, n / 2, false));
  append_rows(rows, em.far, logspace(2.0, a_max, n - n / 2));
  write_csv(o.out / "profile_exterior.csv", {"a", "Q", "dQ"}, rows);
  rep.artifact("profile_exterior.csv");
  rep.resolved("m1", em.m1);
  rep.resolved("m2", em.m2);
  rep.resolved("jacobian_condition", em.jacobian_condition);
  rep.resolved("coeff_one_third", em.far.coefficient_one_third());
  rep.check("newton_residual_two", em.newton_residual, 1e-10);
  return 0;
}

int cmd_glue(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const GlobalProfile g = glue_from(c);
  write_csv(o.out / "profile.csv", {"a", "Q", "dQ"}, profile_rows(g, c.number("a_max", 1e4), c.integer("points", 601)));
  rep.artifact("profile.csv");
  report_glue(rep, g);
  report_exponents(rep, g);
  return 0;
}

int cmd_glue_large(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const LargeGlueResult r = glue_large_from(c);
  const double a_max = c.number("a_max", std::max(1e3, 4.0 * r.rematch.a_eps));
  write_csv(o.out / "profile_large.csv", {"a", "Q", "dQ"}, profile_rows(r.profile, a_max, c.integer("points", 801)));
  rep.artifact("profile_large.csv");
  report_glue(rep, r.profile);
  rep.resolved("c", r.near.c);
  rep.resolved("a_star", r.near.a_star);
  rep.resolved("amplitude_at_star", r.near.amplitude_at_star);
  rep.resolved("a_eps", r.rematch.a_eps);
  rep.resolved("zero_crossings", r.extension.zero_crossings);
  rep.resolved("initial_energy", r.extension.initial_energy);
  rep.check("max_energy_increase_rel", r.extension.max_energy_increase_rel, 1e-8);
  rep.check("a_priori_violation", r.extension.a_priori_violation, 0.0);
  rep.check("rematch_newton_residual", r.rematch.newton_residual, 1e-10);
  return 0;
}

int cmd_regularize(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const CutoffSpec spec{c.number("C", 1.0)};
  const ApproxSolutionField f = build_approx(field_profile(c), spec);
  const double t = c.number("t", 10.0);
  const double r_max = c.number("r_max", 3.0 * t);
  Rows rows;
  double id_err = 0.0;
  for (double r : linspace(r_max / c.integer("points", 601), r_max, c.integer("points", 601))) {
    const ErrorFields e = error_fields(f, t, r);
    rows.push_back({t, r, f.u(t, r), e.e1, e.e2, e.e3});
    id_err = std::max(id_err, std::abs(e3_identity_check(t, r, spec).difference));
  }
  write_csv(o.out / "field.csv", {"t", "r", "u", "e1", "e2", "e3"}, rows);
  rep.artifact("field.csv");
  rep.resolved("cone_value", f.cone_value());
  rep.check("e3_identity", id_err, 1e-12);
  return 0;
}

int cmd_errors(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const ApproxSolutionField f = build_approx(field_profile(c), {c.number("C", 1.0)});
  const std::vector<double> ts =
      logspace(c.number("t_lo", 10.0), c.number("t_hi", 1000.0), c.integer("n_t", 9));
  const ErrorDecayReport er = error_decay_report(f, ts, o.threads);
  Rows rows;
  for (std::size_t i = 0; i < ts.size(); ++i)
    rows.push_back({ts[i], er.l2[0][i], er.l2[1][i], er.l2[2][i], er.sup[0][i], er.sup[1][i], er.sup[2][i]});
  write_csv(o.out / "errors.csv", {"t", "l2_e1", "l2_e2", "l2_e3", "sup_e1", "sup_e2", "sup_e3"}, rows);
  rep.artifact("errors.csv");
  for (int j = 0; j < 3; ++j) {
    const std::string e = "e" + std::to_string(j + 1);
    rep.fit("sup_exponent_" + e, er.sup_fit[j].fit, ts.front(), ts.back());
    rep.fit("l2_exponent_" + e, er.l2_fit[j].fit, ts.front(), ts.back());
    rep.check("sup_exponent_" + e, er.sup_fit[j].fit.slope, -7.0 / 3.0 + 0.05);
    rep.check("l2_exponent_" + e, er.l2_fit[j].fit.slope, -4.0 / 3.0 + 0.05);
  }
  return 0;
}

int cmd_evolve(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const GlobalProfile g = field_profile(c);
  const ApproxSolutionField f = build_approx(g, {c.number("C", 1.0)});
  const double t0 = c.number("t0", 1.0), t1 = c.number("t_end", 3.0);
  const double R = c.number("r_max", 20.0);
  const int cells = static_cast<int>(std::ceil(R * c.integer("cells_per_unit", 32)));
  RadialGridState s = make_grid_state(R, cells, t0, c.sign);
  sample_field(s, [&f](double t, double r) {
    const FieldValue v = f.eval(t, r);
    return std::array<double, 2>{v.u, v.ut};
  });
  EvolveOptions eo;
  eo.t_end = t1;
  eo.cfl = c.number("cfl", 0.5);
  eo.outer_u = [&f, R](double t) { return f.u(t, R); };
  eo.diagnostics_every = c.integer("diagnostics_every", 16);
  const int n_out = c.integer("outputs", 5);
  eo.output_times = linspace(t0, t1, n_out);
  const Trajectory tr = evolve(s, eo);
  Rows rows, diag;
  for (const auto& sn : tr.snapshots)
    for (Eigen::Index i = 0; i < sn.r.size(); ++i) rows.push_back({sn.t, sn.r[i], sn.u[i], sn.ut[i]});
  for (const auto& d : tr.trace) diag.push_back({d.t, d.energy, d.energy_inside_cone, d.sup_u, d.critical_proxy});
  write_csv(o.out / "trajectory.csv", {"t", "r", "u", "ut"}, rows);
  write_csv(o.out / "diagnostics.csv", {"t", "energy", "energy_inside_cone", "sup_u", "critical_proxy"}, diag);
  rep.artifact("trajectory.csv");
  rep.artifact("diagnostics.csv");
  rep.resolved("steps", tr.steps);
  rep.resolved("blew_up", tr.blew_up);
  if (tr.blew_up) {
    rep.resolved("blowup_time", tr.blowup_time);
    rep.resolved("last_good_time", tr.last_good.t);
    return 0;
  }
  // deviation from the self-similar formula off the strip, inside the causally clean region
  const RadialGridState& e = tr.snapshots.back();
  const double C = f.cutoff().C;
  double dev = 0.0;
  for (Eigen::Index i = 1; i < e.r.size(); ++i) {
    const double r = e.r[i];
    if (std::abs(e.t - r) < 2.0 * C + 1.0 || r < 0.2 * e.t || r > 0.9 * R - e.t) continue;
    const double ex = std::pow(e.t, -1.0 / 3.0) * g.value(r / e.t);
    dev = std::max(dev, std::abs(e.u[i] - ex) / std::abs(ex));
  }
  rep.check("self_similar_deviation", dev, 1e-3);
  return 0;
}

int cmd_perturb(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const bool large = c.text("regime", "small") == "large";
  const double T = large ? c.number("T", 10.0) : 1.0;
  const CutoffSpec spec{c.number("C", 1.0) / T};
  GlobalProfile g;
  if (large) {
    LargeGlueOptions lo;
    if (c.has("c")) lo.c = c.number("c");
    g = glue_large_global(c.number("q0", 0.01), c.number("qt1", 10.0), c.sign, lo).profile;
  } else {
    g = glue_from(c);
  }
  const ApproxSolutionField f = build_approx(g, spec);
  PerturbationSpec ps;
  ps.delta = c.number("delta", 1e-3);
  if (c.has("center")) {
    ps.center = c.number("center");
  } else {
    std::mt19937_64 rng(o.seed);
    ps.center = 3.0 + std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
  }
  ps.width = c.number("width", 1.0);
  PerturbOptions po;
  po.t_end = c.number("t_end", 5.0);
  po.h = spec.C / c.integer("cells_per_C", 32);
  const PerturbReport pr = perturb_and_evolve(f, ps, po);
  Rows rows;
  for (std::size_t k = 0; k < pr.t.size(); ++k)
    rows.push_back({pr.t[k], pr.proxy_total[k], pr.proxy_relative[k], pr.v_energy[k]});
  write_csv(o.out / "perturbation.csv", {"t", "proxy_total", "proxy_relative", "v_energy"}, rows);
  rep.artifact("perturbation.csv");
  rep.resolved("center", ps.center);
  rep.resolved("initial_proxy", pr.initial_proxy);
  rep.resolved("max_ratio_total", pr.max_ratio_total);
  rep.resolved("n_cells", pr.n_cells);
  rep.resolved("blew_up", pr.blew_up);
  rep.check("max_ratio_relative", pr.max_ratio_relative, 10.0);
  return 0;
}

int cmd_sweep_exponent(const RunConfig& c, const RunOptions& o, RunReport& rep) {
  const std::vector<double> qt1 = c.numbers("qt1", {10.0, 100.0, 1000.0});
  const double cc = c.number("c", calibrated_c_max() / 2.0);
  const AmplitudeSweep sw = sweep_amplitude_exponent(qt1, c.number("qt2", 0.01), cc, o.threads);
  Rows rows;
  for (std::size_t i = 0; i < sw.qt1.size(); ++i) rows.push_back({sw.qt1[i], sw.amplitude[i], sw.singular_amplitude[i]});
  write_csv(o.out / "sweep_exponent.csv", {"qt1", "amplitude", "singular_amplitude"}, rows);
  rep.artifact("sweep_exponent.csv");
  rep.resolved("c", cc);
  rep.fit("beta_total", sw.beta_total, qt1.front(), qt1.back());
  rep.fit("beta_singular", sw.beta_singular, qt1.front(), qt1.back());
  const double b = sw.beta_singular.slope;
  rep.resolved("beta_nearest", std::abs(b - 1.0 / 9.0) < std::abs(b - 1.0 / 3.0) ? "1/9" : "1/3");
  return 0;
}

int cmd_calibrate(const RunConfig& c, const RunOptions& /*o*/, RunReport& rep) {
  const double cmax = calibrate_c_max(c.numbers("qt1_grid", {1.0, 10.0, 100.0, 1000.0}),
                                      c.numbers("qt2_grid", {0.01, 0.1}));
  rep.resolved("c_max", cmax);
  rep.resolved("c_default", cmax / 2.0);
  rep.resolved("q_max", calibrate_q_boundary(c.sign));
  return 0;
}

int cmd_report(const RunConfig& /*c*/, const RunOptions& o, RunReport& rep) {
  nlohmann::json items = nlohmann::json::array();
  bool all = true;
  std::vector<std::filesystem::path> files;
  if (std::filesystem::exists(o.out))
    for (const auto& e : std::filesystem::directory_iterator(o.out))
      if (e.path().extension() == ".json" && e.path().filename() != "report.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::ifstream in(p);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error&) {
      continue;
    }
    if (!doc.contains("checks")) continue;
    const bool pass = doc.value("all_passed", false);
    all = all && pass;
    items.push_back({{"file", p.filename().string()}, {"command", doc.value("command", "")}, {"all_passed", pass},
                     {"checks", doc["checks"]}, {"fits", doc.value("fits", nlohmann::json::array())}});
  }
  rep.resolved("reports", items);
  rep.resolved("reports_all_passed", all);
  return 0;
}

}  // namespace

const std::vector<std::string>& command_names() { return kCommands; }

int run_command(const std::string& command, const RunConfig& config, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep(command, config);
  int (*fn)(const RunConfig&, const RunOptions&, RunReport&) = nullptr;
  if (command == "profile-interior") fn = cmd_profile_interior;
  else if (command == "profile-exterior") fn = cmd_profile_exterior;
  else if (command == "glue") fn = cmd_glue;
  else if (command == "glue-large") fn = cmd_glue_large;
  else if (command == "regularize") fn = cmd_regularize;
  else if (command == "errors") fn = cmd_errors;
  else if (command == "evolve") fn = cmd_evolve;
  else if (command == "perturb") fn = cmd_perturb;
  else if (command == "sweep-exponent") fn = cmd_sweep_exponent;
  else if (command == "calibrate") fn = cmd_calibrate;
  else if (command == "report") fn = cmd_report;
  else throw ConfigError("command", "unknown subcommand " + command);
  std::filesystem::create_directories(options.out);
  const int rc = fn(config, options, rep);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.write(options.out / (file_stem(command) + ".json"), wall);
  return rc;
}

int run_command_safely(const std::string& command, const RunConfig& config, const RunOptions& options) {
  try {
    return run_command(command, config, options);
  } catch (const ConfigError& e) {
    std::cerr << nlohmann::json{{"error", "config"}, {"field", e.field()}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const StageError& e) {
    std::cerr << nlohmann::json{{"error", "solver"}, {"stage", e.stage()}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", "solver"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}

}  // namespace selfsim::io
