#include "selfsim/singular_expansion.hpp"

#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/nonlinearity.hpp"
#include "selfsim/quadrature.hpp"

namespace selfsim {

SingularExpansion::SingularExpansion(ConeSide side, std::array<ChebSeries, 3> comps, int p3_thirds,
                                     std::array<double, 2> leading, Provenance prov)
    : side_(side), p3_(p3_thirds), leading_(leading), prov_(std::move(prov)) {
  for (std::size_t i = 0; i < 3; ++i) {
    ChebSeries d = comps[i].derivative();
    ChebSeries dd = d.derivative();
    comps_[i] = Component{std::move(comps[i]), std::move(d), std::move(dd)};
  }
}

void SingularExpansion::check(double a) const {
  if (a < lo() || a > hi()) {
    std::ostringstream os;
    os.precision(17);
    os << "SingularExpansion: a = " << a << " outside [" << lo() << ", " << hi() << "]";
    throw DomainError(os.str());
  }
}

SingularExpansion::ComponentValues SingularExpansion::components(double a) const {
  check(a);
  ComponentValues cv;
  for (std::size_t i = 0; i < 3; ++i) {
    cv.v[i] = comps_[i].f(a);
    cv.d1[i] = comps_[i].df(a);
    cv.d2[i] = comps_[i].ddf(a);
  }
  return cv;
}

double SingularExpansion::value(double a) const {
  check(a);
  const double d = std::abs(1.0 - a);
  const double c = std::cbrt(d);
  return c * c * comps_[0].f(a) + comps_[1].f(a) + std::pow(d, p3_ / 3.0) * comps_[2].f(a);
}

Jet<double> SingularExpansion::jet(double a) const {
  const auto cv = components(a);
  const double d = std::abs(1.0 - a);
  const double sg = a > 1.0 ? 1.0 : -1.0;  // d'(a)
  const double p = p3_ / 3.0;
  const double c = std::cbrt(d);
  const double d23 = c * c;
  const double dp = std::pow(d, p);
  Jet<double> j;
  j.value = d23 * cv.v[0] + cv.v[1] + dp * cv.v[2];
  if (d == 0.0) {
    j.d1 = j.d2 = NAN;
    return j;
  }
  const double dm13 = 1.0 / c;
  const double dpm1 = dp / d, dpm2 = dp / (d * d);
  j.d1 = 2.0 / 3.0 * sg * dm13 * cv.v[0] + d23 * cv.d1[0] + cv.d1[1] + p * sg * dpm1 * cv.v[2] + dp * cv.d1[2];
  j.d2 = -2.0 / 9.0 * dm13 / d * cv.v[0] + 4.0 / 3.0 * sg * dm13 * cv.d1[0] + d23 * cv.d2[0] + cv.d2[1] +
         p * (p - 1.0) * dpm2 * cv.v[2] + 2.0 * p * sg * dpm1 * cv.d1[2] + dp * cv.d2[2];
  return j;
}

namespace {

// Precomputed evaluation points and interpolation matrices for one Gauss rule.
struct RuleBlock {
  GaussRule rule;
  Eigen::MatrixXd interp;  // ((n+1)*nq) x (n+1)
  Eigen::VectorXd d_at;    // |1-b| at each point
  Eigen::VectorXd g1, g2;  // kernel split at each point, already times the rule weight
};

}  // namespace

SingularExpansion solve_near_cone(const NearConeProblem& pb) {
  if (!(pb.length > 0.0)) throw DomainError("solve_near_cone: degenerate interval (length must be positive)");
  const double kappa = pb.side == ConeSide::left_of_cone ? -1.0 : 1.0;
  const double lo = pb.side == ConeSide::left_of_cone ? 1.0 - pb.length : 1.0;
  const double hi = pb.side == ConeSide::left_of_cone ? 1.0 : 1.0 + pb.length;
  const int n = pb.degree;
  const int nq = pb.quad_points;
  const double s = sign_factor(pb.sign);
  const Eigen::VectorXd x = ChebSeries::nodes(lo, hi, n);
  const GreenKernel gk(pb.side == ConeSide::left_of_cone ? Region::interior : Region::exterior);

  const double betas[4] = {0.0, 2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0};
  std::array<RuleBlock, 4> blocks;
  for (int r = 0; r < 4; ++r) {
    RuleBlock& bl = blocks[static_cast<std::size_t>(r)];
    bl.rule = gauss_jacobi01(nq, betas[r]);
    const int m = (n + 1) * nq;
    bl.interp.resize(m, n + 1);
    bl.d_at.resize(m);
    bl.g1.resize(m);
    bl.g2.resize(m);
    for (int j = 0; j <= n; ++j) {
      const double d = std::abs(1.0 - x[j]);
      for (int k = 0; k < nq; ++k) {
        const int row = j * nq + k;
        const double u = bl.rule.x[k];
        const double b = 1.0 + kappa * d * u;
        bl.interp.row(row) = ChebSeries::interpolation_row(lo, hi, n, b);
        bl.d_at[row] = d * u;
        bl.g1[row] = bl.rule.w[k] * gk.g1(x[j], b);
        bl.g2[row] = bl.rule.w[k] * gk.g2(x[j], b);
      }
    }
  }

  // homogeneous parts and prefactors at the nodes
  Eigen::VectorXd h1(n + 1), h2(n + 1), pre(n + 1), pre3(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double a = x[j];
    const double d = std::abs(1.0 - a);
    h1[j] = pb.c1 / a;
    h2[j] = pb.c2 * std::cbrt((1.0 + a) / 2.0) * std::cbrt((1.0 + a) / 2.0) / a;
    pre[j] = kappa * s * d;
    pre3[j] = kappa * s * std::pow(d, (7.0 - pb.p3_thirds) / 3.0);
  }

  const SeventhPowerSplit split(pb.p3_thirds);
  Eigen::VectorXd q1 = h1, q2 = h2, q3 = Eigen::VectorXd::Zero(n + 1);

  // (rule index, bin) used by each component: Q1: g1·β=2/3, g2·β=0 on N1; Q2: g1·β=0, g2·β=-2/3 on N0;
  // Q3: g1·β=4/3, g2·β=2/3 on N2.
  struct Use {
    int rule_g1, rule_g2, bin;
  };
  const Use uses[3] = {{1, 0, 1}, {0, 2, 0}, {3, 1, 2}};

  double prev_inc = INFINITY;
  int stall = 0;
  const double scale = std::max({std::abs(pb.c1), std::abs(pb.c2), 1e-300});
  for (int it = 1; it <= pb.max_iter; ++it) {
    std::array<Eigen::VectorXd, 3> acc;
    for (auto& v : acc) v = Eigen::VectorXd::Zero(n + 1);
    std::array<std::array<Eigen::VectorXd, 3>, 4> nl;  // per rule, per bin
    for (int r = 0; r < 4; ++r) {
      const RuleBlock& bl = blocks[static_cast<std::size_t>(r)];
      const Eigen::VectorXd v1 = bl.interp * q1, v2 = bl.interp * q2, v3 = bl.interp * q3;
      const Eigen::Index m = v1.size();
      for (auto& vb : nl[static_cast<std::size_t>(r)]) vb.resize(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        const auto nn = split(bl.d_at[i], v1[i], v2[i], v3[i]);
        for (int b = 0; b < 3; ++b) nl[static_cast<std::size_t>(r)][static_cast<std::size_t>(b)][i] = nn[static_cast<std::size_t>(b)];
      }
    }
    for (int c = 0; c < 3; ++c) {
      const Use& us = uses[c];
      const RuleBlock& b1 = blocks[static_cast<std::size_t>(us.rule_g1)];
      const RuleBlock& b2 = blocks[static_cast<std::size_t>(us.rule_g2)];
      const auto& n1 = nl[static_cast<std::size_t>(us.rule_g1)][static_cast<std::size_t>(us.bin)];
      const auto& n2 = nl[static_cast<std::size_t>(us.rule_g2)][static_cast<std::size_t>(us.bin)];
      for (int j = 0; j <= n; ++j) {
        double sum = 0.0;
        for (int k = 0; k < nq; ++k) {
          const int row = j * nq + k;
          sum += b1.g1[row] * n1[row] + b2.g2[row] * n2[row];
        }
        acc[static_cast<std::size_t>(c)][j] = sum;
      }
    }
    Eigen::VectorXd n1v = h1 + pre.cwiseProduct(acc[0]);
    Eigen::VectorXd n2v = h2 + pre.cwiseProduct(acc[1]);
    Eigen::VectorXd n3v = pre3.cwiseProduct(acc[2]);
    if (!n1v.allFinite() || !n2v.allFinite() || !n3v.allFinite())
      throw ContractionFailure("near-cone contraction failure: iterate diverged (parameters too large)", it, INFINITY);
    const double inc = std::max({(n1v - q1).cwiseAbs().maxCoeff(), (n2v - q2).cwiseAbs().maxCoeff(),
                                 (n3v - q3).cwiseAbs().maxCoeff()});
    q1 = std::move(n1v);
    q2 = std::move(n2v);
    q3 = std::move(n3v);
    if (inc <= pb.tol * std::max(1.0, scale) || inc == 0.0) {
      Provenance prov;
      prov.construction = pb.side == ConeSide::left_of_cone ? "near_cone_left" : "near_cone_right";
      prov.params = {{"c1", pb.c1},
                     {"c2", pb.c2},
                     {"length", pb.length},
                     {"p3_thirds", pb.p3_thirds},
                     {"degree", n},
                     {"quad_points", nq},
                     {"iterations", it},
                     {"final_increment", inc},
                     {"tol", pb.tol}};
      prov.notes["green_sign"] = pb.side == ConeSide::left_of_cone ? "Q = hom - s*int_a^1 G Q^7 db"
                                                                    : "Q = hom + s*int_1^a G Q^7 db";
      return SingularExpansion(pb.side, {ChebSeries(lo, hi, q1), ChebSeries(lo, hi, q2), ChebSeries(lo, hi, q3)},
                               pb.p3_thirds, {pb.c1, pb.c2}, std::move(prov));
    }
    if (inc >= prev_inc) {
      if (++stall >= pb.stall_limit)
        throw ContractionFailure("near-cone contraction failure: increments stopped decreasing (parameters too large)",
                                 it, inc);
    } else {
      stall = 0;
    }
    if (inc > 1e8 * std::max(1.0, scale))
      throw ContractionFailure("near-cone contraction failure: iterate diverged (parameters too large)", it, inc);
    prev_inc = inc;
  }
  throw ContractionFailure("near-cone contraction failure: iteration budget exhausted", pb.max_iter, prev_inc);
}

}  // namespace selfsim
