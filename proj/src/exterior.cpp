#include "selfsim/exterior.hpp"

#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/newton.hpp"

namespace selfsim {

namespace {
constexpr double kTwo = 2.0;
}

SingularExpansion near_cone_exterior(double qt1, double qt2, Sign sign, const NearConeOptions& opt) {
  if (opt.enforce_eps_small && (std::abs(qt1) >= opt.eps_small || std::abs(qt2) >= opt.eps_small)) {
    std::ostringstream os;
    os << "near_cone_exterior: coefficients (" << qt1 << ", " << qt2 << ") not below eps_small = " << opt.eps_small;
    throw DomainError(os.str());
  }
  NearConeProblem pb;
  pb.side = ConeSide::right_of_cone;
  pb.length = 1.0;
  pb.c1 = qt1;
  pb.c2 = qt2;
  pb.sign = sign;
  pb.p3_thirds = 7;
  pb.degree = opt.degree;
  pb.quad_points = opt.quad_points;
  pb.tol = opt.tol;
  pb.max_iter = opt.max_iter;
  SingularExpansion e = solve_near_cone(pb);
  e.provenance().construction = "near_cone_exterior";
  e.provenance().params["s"] = sign_factor(sign);
  return e;
}

SampledProfile far_field(double m1, double m2, Sign sign, double a_max, const FarFieldOptions& opt) {
  if (!(a_max >= 100.0)) throw DomainError("far_field: A_max must be at least 100");
  return solve_far_field(m1, m2, sign, kTwo, opt).sampled(a_max);
}

ExteriorMatch match_at_two(double qt1, double qt2, Sign sign, double a_max, const ExteriorOptions& opt) {
  if (!(a_max >= 100.0)) throw DomainError("match_at_two: A_max must be at least 100");
  ExteriorMatch m;
  m.qt1 = qt1;
  m.qt2 = qt2;
  try {
    m.near = near_cone_exterior(qt1, qt2, sign, opt.near_cone);
  } catch (const Error& e) {
    throw StageError("near_cone_exterior", e.what());
  }
  const auto tgt = m.near.jet(kTwo);
  const FundamentalPair pair{Region::exterior};
  const auto p1 = pair.jet(Branch::first, kTwo);
  const auto p2 = pair.jet(Branch::second, kTwo);
  Eigen::Matrix2d j0;
  j0 << p1.value, p2.value, p1.d1, p2.d1;
  Eigen::Vector2d x0 = j0.fullPivLu().solve(Eigen::Vector2d(tgt.value, tgt.d1));
  auto residual = [&](const Eigen::Vector2d& c) -> Eigen::Vector2d {
    const FarField ff = solve_far_field(c[0], c[1], sign, kTwo, opt.far_field);
    const auto j = ff.jet(kTwo);
    return Eigen::Vector2d(j.value - tgt.value, j.d1 - tgt.d1);
  };
  Newton2Options nopt;
  nopt.tol = opt.newton_tol;
  Newton2Result nr;
  try {
    nr = newton2(residual, x0, j0, nopt);
  } catch (const NewtonStagnation&) {
    throw;
  } catch (const Error& e) {
    throw StageError("far_field", e.what());
  }
  m.m1 = nr.x[0];
  m.m2 = nr.x[1];
  m.newton_residual = nr.residual_norm;
  m.newton_iterations = nr.iterations;
  m.jacobian = nr.jacobian;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(nr.jacobian);
  m.jacobian_condition = svd.singularValues()[0] / svd.singularValues()[1];
  m.far = solve_far_field(m.m1, m.m2, sign, kTwo, opt.far_field);
  return m;
}

std::pair<double, double> decay_tune(double m, Sign sign, double a_max, const FarFieldOptions& opt) {
  if (!(a_max >= 100.0)) throw DomainError("decay_tune: A_max must be at least 100");
  if (m == 0.0) return {0.0, 0.0};
  // For a ratio rho = m2/m1, scale m1 so that R'(0) = m, then read R(0).
  auto coeff = [&](double rho, double* m1_out) {
    const double m1 = m / ((2.0 / 3.0) * (rho - 1.0));
    const FarField ff = solve_far_field(m1, rho * m1, sign, kTwo, opt);
    *m1_out = m1;
    return ff.coefficient_one_third() / std::abs(m);
  };
  double r0 = 0.0, r1 = -0.5, m1 = 0.0;
  double f0 = coeff(r0, &m1), f1 = coeff(r1, &m1);
  for (int it = 0; it < 50; ++it) {
    if (f1 == f0) break;
    const double r2 = r1 - f1 * (r1 - r0) / (f1 - f0);
    r0 = r1;
    f0 = f1;
    r1 = r2;
    f1 = coeff(r1, &m1);
    if (std::abs(f1) < 1e-15) break;
  }
  if (!(std::abs(f1) < 1e-12)) throw FitError("decay_tune: secant did not zero the a^{-1/3} coefficient");
  return {m1, r1 * m1};
}

namespace {

// Measured decay class: tuned when the a^{-1/3} coefficient is negligible against the a^{-4/3} one.
DecayClass classify(const FarField& ff) {
  const double c13 = std::abs(ff.coefficient_one_third()), c43 = std::abs(ff.coefficient_four_thirds());
  return c13 <= 1e-9 * std::max(c43, 1e-300) ? DecayClass::tuned_a_minus_four_thirds
                                              : DecayClass::generic_a_minus_one_third;
}

GlobalProfile assemble(const InteriorMatch& im, const ExteriorMatch& em, Sign sign) {
  GlueParams gp;
  gp.q0 = im.q0;
  gp.q1 = im.q1;
  gp.q2 = im.q2;
  gp.qt1 = em.qt1;
  gp.qt2 = em.qt2;
  gp.m1 = em.m1;
  gp.m2 = em.m2;
  gp.newton_residual_half = im.newton_residual;
  gp.newton_residual_two = em.newton_residual;
  gp.coeff_one_third = em.far.coefficient_one_third();
  gp.coeff_four_thirds = em.far.coefficient_four_thirds();
  std::vector<GlobalPiece> pieces;
  pieces.push_back({0.0, 0.5, "interior", im.inner});
  pieces.push_back({0.5, 1.0, "near_cone_left", im.outer});
  pieces.push_back({1.0, 2.0, "near_cone_right", em.near});
  pieces.push_back({2.0, INFINITY, "far_field", em.far});
  return GlobalProfile(std::move(pieces), gp, sign, classify(em.far));
}

}  // namespace

GlobalProfile glue_global(double q0, Sign sign, const GlueOptions& opt) {
  InteriorMatch im;
  try {
    im = match_at_half(q0, sign, opt.interior);
  } catch (const StageError& e) {
    throw StageError("match_at_half", e.what());
  } catch (const Error& e) {
    throw StageError("match_at_half", e.what());
  }
  const double qt2 = im.q2;
  auto exterior = [&](double qt1) {
    try {
      return match_at_two(qt1, qt2, sign, opt.a_max, opt.exterior);
    } catch (const Error& e) {
      throw StageError("match_at_two", e.what());
    }
  };
  if (opt.decay == DecayClass::generic_a_minus_one_third) {
    const ExteriorMatch em = exterior(opt.qt1.value_or(im.q1));
    return assemble(im, em, sign);
  }
  // tuned: zero R(0) = m1 + m2 as a function of q̃1 by secant
  if (std::abs(qt2) == 0.0) return assemble(im, exterior(0.0), sign);
  double x0 = -std::pow(2.0, -2.0 / 3.0) * qt2;
  double x1 = x0 * (1.0 + 1e-3);
  ExteriorMatch e0 = exterior(x0), e1 = exterior(x1);
  double f0 = e0.m1 + e0.m2, f1 = e1.m1 + e1.m2;
  for (int it = 0; it < 40 && std::abs(f1) > opt.tune_tol * std::abs(qt2); ++it) {
    if (f1 == f0) break;
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    e1 = exterior(x1);
    f1 = e1.m1 + e1.m2;
  }
  if (!(std::abs(f1) < 1e-12)) throw StageError("decay_tune", "secant on q̃1 did not remove the a^{-1/3} term");
  return assemble(im, e1, sign);
}

}  // namespace selfsim
