#include "selfsim/interior.hpp"

#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/fit.hpp"
#include "selfsim/newton.hpp"
#include "selfsim/quadrature.hpp"

namespace selfsim {

namespace {

constexpr double kHalf = 0.5;

double pow7(double x) {
  const double x2 = x * x;
  return x2 * x2 * x2 * x;
}

SampledProfile zero_profile(double lo, double hi, int n, Provenance prov) {
  return SampledProfile::from_values(lo, hi, Eigen::VectorXd::Zero(n + 1), std::move(prov));
}

}  // namespace

SampledProfile picard_interior(double q0, Sign sign, const InteriorOptions& opt) {
  if (opt.enforce_q_max && std::abs(q0) > opt.q_max) {
    std::ostringstream os;
    os << "picard_interior: |q0| = " << std::abs(q0) << " exceeds q_max = " << opt.q_max;
    throw DomainError(os.str());
  }
  const int n = opt.degree, nq = opt.quad_points;
  Provenance prov;
  prov.construction = "picard_interior";
  prov.params = {{"q0", q0}, {"s", sign_factor(sign)}, {"degree", n}, {"quad_points", nq}, {"tol", opt.tol}};
  prov.notes["green_sign"] = "Q = q0*Q0 + s*int_0^a G Q^7 db";
  if (std::abs(q0) < 1e-14) {
    prov.params["iterations"] = 0;
    return zero_profile(0.0, kHalf, n, std::move(prov));
  }
  const double s = sign_factor(sign);
  const Eigen::VectorXd x = ChebSeries::nodes(0.0, kHalf, n);
  const GaussRule gl = gauss_legendre01(nq);
  const GreenKernel gk(Region::interior);
  Eigen::MatrixXd interp((n + 1) * nq, n + 1);
  Eigen::VectorXd wk((n + 1) * nq);
  Eigen::VectorXd seed(n + 1);
  for (int j = 0; j <= n; ++j) {
    seed[j] = q0 * linear_seed(x[j]).value;
    for (int k = 0; k < nq; ++k) {
      const int row = j * nq + k;
      interp.row(row) = ChebSeries::interpolation_row(0.0, kHalf, n, x[j] * gl.x[k]);
      wk[row] = x[j] * gl.w[k] * gk.rescaled(x[j], gl.x[k]);
    }
  }
  Eigen::VectorXd q = seed;
  double prev = INFINITY;
  int stall = 0;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const Eigen::VectorXd qb = interp * q;
    Eigen::VectorXd next = seed;
    for (int j = 0; j <= n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < nq; ++k) acc += wk[j * nq + k] * pow7(qb[j * nq + k]);
      next[j] += s * acc;
    }
    if (!next.allFinite())
      throw ContractionFailure("contraction failure, q0 too large (iterate diverged)", it, INFINITY);
    const double inc = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (inc < opt.tol) {
      prov.params["iterations"] = it;
      prov.params["final_increment"] = inc;
      return SampledProfile::from_values(0.0, kHalf, q, std::move(prov));
    }
    if (inc >= prev) {
      if (++stall >= opt.stall_limit)
        throw ContractionFailure("contraction failure, q0 too large", it, inc);
    } else {
      stall = 0;
    }
    if (inc > 1e6 * std::max(1.0, std::abs(q0)))
      throw ContractionFailure("contraction failure, q0 too large (iterate diverged)", it, inc);
    prev = inc;
  }
  throw ContractionFailure("contraction failure, q0 too large (iteration budget exhausted)", opt.max_iter, prev);
}

double interior_map(const SampledProfile& profile, double q0, Sign sign, double a, int quad_points) {
  const GaussRule gl = gauss_legendre01(quad_points);
  const GreenKernel gk(Region::interior);
  double acc = 0.0;
  for (int k = 0; k < quad_points; ++k) acc += gl.w[k] * gk.rescaled(a, gl.x[k]) * pow7(profile.value(a * gl.x[k]));
  return q0 * linear_seed(a).value + sign_factor(sign) * a * acc;
}

SingularExpansion near_cone_interior(double q1, double q2, Sign sign, const NearConeOptions& opt) {
  if (opt.enforce_eps_small && (std::abs(q1) >= opt.eps_small || std::abs(q2) >= opt.eps_small)) {
    std::ostringstream os;
    os << "near_cone_interior: coefficients (" << q1 << ", " << q2 << ") not below eps_small = " << opt.eps_small;
    throw DomainError(os.str());
  }
  NearConeProblem pb;
  pb.side = ConeSide::left_of_cone;
  pb.length = kHalf;
  pb.c1 = q1;
  pb.c2 = q2;
  pb.sign = sign;
  pb.p3_thirds = 7;
  pb.degree = opt.degree;
  pb.quad_points = opt.quad_points;
  pb.tol = opt.tol;
  pb.max_iter = opt.max_iter;
  SingularExpansion e = solve_near_cone(pb);
  e.provenance().construction = "near_cone_interior";
  e.provenance().params["s"] = sign_factor(sign);
  return e;
}

InteriorMatch match_at_half(double q0, Sign sign, const MatchOptions& opt) {
  InteriorMatch m;
  m.q0 = q0;
  try {
    m.inner = picard_interior(q0, sign, opt.interior);
  } catch (const Error& e) {
    throw StageError("picard_interior", e.what());
  }
  const double qh = m.inner.value(kHalf), dqh = m.inner.derivative(kHalf);
  const FundamentalPair pair{Region::interior};
  const auto p1 = pair.jet(Branch::first, kHalf);
  const auto p2 = pair.jet(Branch::second, kHalf);
  const double k2 = std::pow(2.0, -2.0 / 3.0);
  Eigen::Matrix2d j0;
  j0 << p1.value, k2 * p2.value, p1.d1, k2 * p2.d1;
  const Eigen::Vector2d target(qh, dqh);
  Eigen::Vector2d x0 = j0.fullPivLu().solve(target);
  if (std::abs(q0) < 1e-14) x0.setZero();

  auto residual = [&](const Eigen::Vector2d& c) -> Eigen::Vector2d {
    SingularExpansion e = near_cone_interior(c[0], c[1], sign, opt.near_cone);
    const auto jt = e.jet(kHalf);
    return Eigen::Vector2d(jt.value - qh, jt.d1 - dqh);
  };
  Newton2Options nopt;
  nopt.tol = opt.newton_tol;
  Newton2Result nr;
  try {
    nr = newton2(residual, x0, j0, nopt);
  } catch (const NewtonStagnation&) {
    throw;
  } catch (const Error& e) {
    throw StageError("near_cone_interior", e.what());
  }
  m.q1 = nr.x[0];
  m.q2 = nr.x[1];
  m.newton_residual = nr.residual_norm;
  m.newton_iterations = nr.iterations;
  m.jacobian = nr.jacobian;
  m.trail = nr.trail;
  m.outer = near_cone_interior(m.q1, m.q2, sign, opt.near_cone);
  m.outer.provenance().params["newton_residual"] = m.newton_residual;
  return m;
}

ExponentFit fit_singular_exponent(const std::function<double(double)>& q, double cone_value, ConeSide side,
                                  double d_lo, double d_hi, ExponentModel model, int per_decade) {
  if (!(d_lo > 0) || !(d_hi > d_lo)) throw FitError("fit_singular_exponent: invalid window");
  const int n = static_cast<int>(std::lround(per_decade * std::log10(d_hi / d_lo))) + 1;
  if (n < 10) throw FitError("fit_singular_exponent: window too small for a stable fit (fewer than 10 samples)");
  const std::vector<double> d = logspace(d_lo, d_hi, n);
  std::vector<double> y;
  y.reserve(d.size());
  for (double di : d) {
    const double a = side == ConeSide::left_of_cone ? 1.0 - di : 1.0 + di;
    y.push_back(q(a) - cone_value);
  }
  ExponentFit f;
  f.window_lo = d_lo;
  f.window_hi = d_hi;
  f.samples = n;
  f.model = model;
  const LineFit lf = fit_loglog(d, y);
  f.pure_slope = lf.slope;
  f.pure_ci95_half = lf.ci95_half;
  if (model == ExponentModel::pure_power) {
    f.exponent = lf.slope;
    f.ci95_half = lf.ci95_half;
    f.residual = lf.rms_residual;
  } else {
    const PowerLinearFit pf = fit_power_plus_linear(d, y);
    f.exponent = pf.exponent;
    f.ci95_half = pf.ci95_half;
    f.residual = pf.rms_relative_residual;
  }
  return f;
}

double calibrate_q_boundary(Sign sign, double hi, int steps) {
  InteriorOptions o;
  o.enforce_q_max = false;
  o.max_iter = 2000;
  auto ok = [&](double q0) {
    try {
      picard_interior(q0, sign, o);
      return true;
    } catch (const ContractionFailure&) {
      return false;
    }
  };
  double lo = 0.0;
  if (ok(hi)) return hi;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace selfsim
