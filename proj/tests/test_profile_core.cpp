#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <thread>

#include "selfsim/fit.hpp"
#include "selfsim/fundamental.hpp"
#include "selfsim/interior.hpp"
#include "selfsim/oracle.hpp"
#include "selfsim/quadrature.hpp"
#include "selfsim/sampled_profile.hpp"

using namespace selfsim;

namespace {

const FundamentalPair kInner{Region::interior};
const FundamentalPair kOuter{Region::exterior};

double fd8(const std::function<double(double)>& f, double x, double h) {
  static const double c[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  double s = 0;
  for (int k = 1; k <= 4; ++k) s += c[k - 1] * (f(x + k * h) - f(x - k * h));
  return s / h;
}

double lin_residual(const Jet<double>& j, double a) { return linear_operator(j.value, j.d1, j.d2, a); }

// Variation of parameters written out from the closed forms:
// φ = (3/4)[φ1(a) I1(a) - φ2(a) I2(a)], I1 = ∫ b (1-b)^{-2/3} f, I2 = ∫ b (1+b)^{-2/3} f.
struct Reproduced {
  double value, d1, d2;
};

Reproduced reproduce(const std::function<double(double)>& f, double a) {
  auto rule = gauss_legendre(48, 0.0, a);
  double i1 = 0, i2 = 0;
  for (Eigen::Index k = 0; k < rule.x.size(); ++k) {
    const double b = rule.x[k];
    i1 += rule.w[k] * b * std::pow(1 - b, -2.0 / 3) * f(b);
    i2 += rule.w[k] * b * std::pow(1 + b, -2.0 / 3) * f(b);
  }
  auto p1 = kInner.jet(Branch::first, a);
  auto p2 = kInner.jet(Branch::second, a);
  const double boundary = a * f(a) * (p1.d1 * std::pow(1 - a, -2.0 / 3) - p2.d1 * std::pow(1 + a, -2.0 / 3));
  return {0.75 * (p1.value * i1 - p2.value * i2), 0.75 * (p1.d1 * i1 - p2.d1 * i2),
          0.75 * (p1.d2 * i1 - p2.d2 * i2 + boundary)};
}

double green_direct(double a, double b) {
  auto p1 = [](double x) { return std::pow(1 - x, 2.0 / 3) / x; };
  auto p2 = [](double x) { return std::pow(1 + x, 2.0 / 3) / x; };
  const double w = 4.0 / 3 / (b * b * std::cbrt(1 - b * b));
  return (p1(a) * p2(b) - p1(b) * p2(a)) / (w * (b * b - 1));
}

}  // namespace

TEST_CASE("fundamental pair closed-form values") {
  CHECK(eval_fundamental(kInner, Branch::first, 0.5).value == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
  CHECK(eval_fundamental(kOuter, Branch::first, 2.0).value == doctest::Approx(0.5).epsilon(1e-15));
  // (3/4)(φ2 - φ1) -> 1 as a -> 0
  for (double a : {1e-3, 1e-5}) {
    const double q0 = 0.75 * (eval_fundamental(kInner, Branch::second, a).value -
                              eval_fundamental(kInner, Branch::first, a).value);
    CHECK(std::abs(q0 - 1) < 2 * a);
  }
  CHECK(linear_seed(0.0).value == doctest::Approx(1.0).epsilon(1e-15));
  // φ1 vanishes at the cone from the left, φ̃1 from the right
  CHECK(std::abs(eval_fundamental(kInner, Branch::first, 1 - 1e-9).value) < 1e-5);
  CHECK(std::abs(eval_fundamental(kOuter, Branch::first, 1 + 1e-9).value) < 1e-5);
}

TEST_CASE("fundamental pair rejects points outside the validity domain") {
  CHECK_THROWS_AS(eval_fundamental(kInner, Branch::first, 1.2), DomainError);
  CHECK_THROWS_AS(eval_fundamental(kInner, Branch::first, 0.0), DomainError);
  CHECK_THROWS_AS(eval_fundamental(kOuter, Branch::first, 0.7), DomainError);
  CHECK_THROWS_AS(eval_fundamental(kInner, Branch::second, -0.1), DomainError);
  CHECK_NOTHROW(eval_fundamental(kOuter, Branch::second, 0.3));
}

TEST_CASE("fundamental solutions solve the homogeneous equation") {
  double worst = 0, worst_rel = 0;
  for (double d : logspace(1e-3, 0.95, 100)) {
    const double a = 1 - d;
    for (Branch b : {Branch::first, Branch::second}) worst = std::max(worst, std::abs(lin_residual(kInner.jet(b, a), a)));
  }
  // closer to a = 0 the terms grow like a^{-3}; compare against their size
  for (double a : logspace(1e-2, 0.05, 20)) {
    for (Branch b : {Branch::first, Branch::second}) {
      auto j = kInner.jet(b, a);
      const double scale = std::abs((a * a - 1) * j.d2) + std::abs((8 * a / 3 - 2 / a) * j.d1) + std::abs(j.value);
      worst_rel = std::max(worst_rel, std::abs(lin_residual(j, a)) / scale);
    }
  }
  CHECK(worst_rel < 1e-14);
  for (double d : logspace(1e-3, 1e3, 100)) {
    const double a = 1 + d;
    for (Branch b : {Branch::first, Branch::second}) worst = std::max(worst, std::abs(lin_residual(kOuter.jet(b, a), a)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("analytic derivatives agree with finite differences") {
  for (double a : {0.2, 0.6, 0.9}) {
    for (Branch b : {Branch::first, Branch::second}) {
      auto f = [&](double x) { return kInner.jet(b, x).value; };
      auto df = [&](double x) { return kInner.jet(b, x).d1; };
      CHECK(kInner.jet(b, a).d1 == doctest::Approx(fd8(f, a, 1e-3)).epsilon(1e-10));
      CHECK(kInner.jet(b, a).d2 == doctest::Approx(fd8(df, a, 1e-3)).epsilon(1e-9));
    }
  }
}

TEST_CASE("wronskian closed form") {
  CHECK(wronskian(kInner, 0.5) == doctest::Approx(16.0 / 3 * std::cbrt(4.0 / 3)).epsilon(1e-14));
  CHECK(wronskian(kInner, 0.5) == doctest::Approx(5.8701).epsilon(1e-4));

  double worst = 0;
  for (int i = 0; i <= 90; ++i) {
    const double a = 0.05 + 0.01 * i;
    const double w = wronskian(kInner, a);
    const double closed = 4.0 / 3 / (a * a) * std::pow(1 - a * a, -1.0 / 3);
    auto p1 = kInner.jet(Branch::first, a), p2 = kInner.jet(Branch::second, a);
    worst = std::max({worst, std::abs(w - closed) / w, std::abs(p1.value * p2.d1 - p1.d1 * p2.value - closed) / w});
  }
  CHECK(worst < 1e-10);

  const double a = 0.3;
  auto v1 = [](double x) { return kInner.jet(Branch::first, x).value; };
  auto v2 = [](double x) { return kInner.jet(Branch::second, x).value; };
  const double fd = v1(a) * fd8(v2, a, 2e-3) - fd8(v1, a, 2e-3) * v2(a);
  CHECK(std::abs(fd - wronskian(kInner, a)) < 1e-10);

  const double near = 0.999;
  CHECK(wronskian(kInner, near) / std::pow(1 - near * near, -1.0 / 3) ==
        doctest::Approx(4.0 / 3 / (near * near)).epsilon(0.01));

  for (double x : {1.5, 3.0, 40.0}) {
    auto e1 = kOuter.jet(Branch::first, x), e2 = kOuter.jet(Branch::second, x);
    const double w = wronskian(kOuter, x);
    CHECK(std::abs(e1.value * e2.d1 - e1.d1 * e2.value - w) < 1e-12 * std::abs(w));
  }
  CHECK_THROWS_AS(wronskian(kInner, 1.0), DomainError);
}

TEST_CASE("green kernel") {
  GreenKernel g(Region::interior);
  for (double a : {0.1, 0.25, 0.5, 0.8}) CHECK(std::abs(g(a, a)) < 1e-15);
  CHECK(g(0.5, 0.25) == doctest::Approx(green_direct(0.5, 0.25)).epsilon(1e-13));
  for (double a : {0.2, 0.45}) {
    for (double u : {0.1, 0.5, 0.9}) CHECK(g.rescaled(a, u) == doctest::Approx(g(a, a * u)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(g(0.5, 1.0), DomainError);
  GreenKernel ge(Region::exterior);
  CHECK(std::abs(ge(3.0, 3.0)) < 1e-15);
  CHECK_THROWS_AS(ge(0.5, 2.0), DomainError);

  SUBCASE("kernel bounds with one constant") {
    double c_b = 0;
    for (int i = 1; i <= 50; ++i) {
      const double a = 0.5 * i / 50;
      for (int k = 1; k < 50; ++k) {
        const double b = a * k / 50;
        c_b = std::max(c_b, std::abs(g(a, b)) / b);
      }
    }
    CHECK(c_b < 10);
    std::vector<double> ratio;
    for (double a : {0.1, 0.3, 0.5}) {
      auto rule = gauss_legendre(64, 0.0, a);
      double s = 0;
      for (Eigen::Index k = 0; k < rule.x.size(); ++k) s += rule.w[k] * std::abs(g(a, rule.x[k]));
      ratio.push_back(s / (a * a));
    }
    const double c = *std::max_element(ratio.begin(), ratio.end());
    for (double r : ratio) {
      CHECK(r <= c);
      CHECK(r > 0.5 * c);
    }
  }
}

TEST_CASE("green kernel reproduces the inhomogeneous equation") {
  std::vector<std::function<double(double)>> rhs = {
      [](double b) { return b * b; },
      [](double) { return 1.0; },
      [](double b) { return std::cos(3 * b); },
      [](double b) { return std::exp(-b); },
      [](double b) { return 1 / (1 + b * b); },
  };
  double worst = 0;
  for (auto& f : rhs) {
    for (int i = 0; i <= 20; ++i) {
      const double a = 0.05 + 0.02 * i;
      auto p = reproduce(f, a);
      worst = std::max(worst, std::abs(linear_operator(p.value, p.d1, p.d2, a) - f(a)));
      // against the kernel itself, by quadrature of -∫ G f
      auto rule = gauss_legendre(48, 0.0, a);
      GreenKernel g;
      double phi = 0;
      for (Eigen::Index k = 0; k < rule.x.size(); ++k) phi -= rule.w[k] * g(a, rule.x[k]) * f(rule.x[k]);
      CHECK(phi == doctest::Approx(p.value).epsilon(1e-12));
    }
    // zero Cauchy data at a = 0
    auto p = reproduce(f, 1e-4);
    CHECK(std::abs(p.value) < 1e-7);
    CHECK(std::abs(p.d1) < 1e-3);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("ode residual formula") {
  CHECK(ode_residual(0.0, 0.0, 0.0, 0.4, Sign::defocusing) == 0.0);
  CHECK(ode_residual(0.0, 0.0, 0.0, 0.4, Sign::focusing) == 0.0);
  auto j = kInner.jet(Branch::first, 0.4);
  CHECK(std::abs(lin_residual(j, 0.4)) < 1e-12);
  const double q7 = std::pow(j.value, 7);
  CHECK(ode_residual(j.value, j.d1, j.d2, 0.4, Sign::defocusing) == doctest::Approx(lin_residual(j, 0.4) + q7));
  CHECK(ode_residual(j.value, j.d1, j.d2, 0.4, Sign::focusing) == doctest::Approx(lin_residual(j, 0.4) - q7));
  // even limit at a = 0: -3Q'' + 4Q/9 ± Q^7
  CHECK(ode_residual(1.0, 0.0, 4.0 / 27 + 1.0 / 3, 0.0, Sign::defocusing) == doctest::Approx(0.0));
}

TEST_CASE("picard profile has small residual at random points") {
  auto p = picard_interior(0.01, Sign::defocusing);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.45);
  double worst = 0;
  for (int i = 0; i < 40; ++i) {
    const double a = u(rng);
    auto jj = p.jet(a);
    worst = std::max(worst, std::abs(ode_residual(jj.value, jj.d1, jj.d2, a, Sign::defocusing)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("oracle integrator") {
  OracleOptions tight;
  SUBCASE("zero data stays zero") {
    auto o = oracle_integrate(interior_series(0.0, Sign::defocusing, 0.01), 0.45, Sign::defocusing);
    CHECK(o.final_state().q == 0.0);
    CHECK(o.final_state().dq == 0.0);
  }
  SUBCASE("round trip") {
    OdeState s{0.1, 0.3, 0.02};
    auto fwd = oracle_integrate(s, 0.45, Sign::focusing);
    auto back = oracle_integrate(fwd.final_state(), 0.1, Sign::focusing);
    CHECK(std::abs(back.final_state().q - s.q) < 10 * tight.rtol);
    CHECK(std::abs(back.final_state().dq - s.dq) < 10 * tight.rtol);
  }
  SUBCASE("dense output is consistent with the equation") {
    auto o = oracle_integrate(interior_series(0.1, Sign::focusing, 0.01), 0.9, Sign::focusing);
    for (double a : {0.2, 0.5, 0.85}) {
      auto s = o(a);
      CHECK(std::abs(ode_residual(s.q, s.dq, o.second_derivative(a), a, Sign::focusing)) < 1e-12);
    }
  }
  SUBCASE("paths through singular points are refused") {
    CHECK_THROWS_AS(oracle_integrate(OdeState{0.5, 0.1, 0.0}, 1.5, Sign::defocusing), SingularApproach);
    CHECK_THROWS_AS(oracle_integrate(OdeState{0.5, 0.1, 0.0}, 0.9995, Sign::defocusing), SingularApproach);
    CHECK_THROWS_AS(oracle_integrate(OdeState{0.5, 0.1, 0.0}, 0.0, Sign::defocusing), SingularApproach);
    try {
      oracle_integrate(OdeState{0.5, 0.1, 0.0}, 1.5, Sign::defocusing);
    } catch (const SingularApproach& e) {
      CHECK(std::abs(e.where() - 1.0) < 1e-2);
    }
  }
  SUBCASE("agrees with the picard interior") {
    for (Sign sg : {Sign::defocusing, Sign::focusing}) {
      auto o = oracle_integrate(interior_series(0.01, sg, 0.01), 0.45, sg);
      CHECK(std::abs(o.final_state().q - picard_interior(0.01, sg).value(0.45)) < 1e-9);
    }
  }
}

TEST_CASE("interior power series against the oracle") {
  auto s = interior_series(0.1, Sign::defocusing, 0.05);
  auto o = oracle_integrate(interior_series(0.1, Sign::defocusing, 0.01), 0.05, Sign::defocusing);
  CHECK(s.q == doctest::Approx(o.final_state().q).epsilon(1e-13));
  CHECK(s.dq == doctest::Approx(o.final_state().dq).epsilon(1e-11));
}

TEST_CASE("sampled profile reproduces nodes and derivative") {
  const int n = 24;
  Eigen::VectorXd x = ChebSeries::nodes(0.1, 0.6, n);
  Eigen::VectorXd q = x.unaryExpr([](double a) { return std::sin(3 * a) / (1 + a); });
  auto p = SampledProfile::from_values(0.1, 0.6, q, Provenance{"test", {}, {}});
  for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(p.value(x[i]) == q[i]);
  auto f = [&](double a) { return p.value(a); };
  for (double a : {0.2, 0.35, 0.5}) CHECK(p.derivative(a) == doctest::Approx(fd8(f, a, 1e-3)).epsilon(1e-9));
  CHECK_THROWS_AS(p.value(0.7), DomainError);
}

TEST_CASE("gauss-jacobi rules integrate weighted monomials exactly") {
  for (double beta : {0.0, 2.0 / 3, -2.0 / 3, 4.0 / 3}) {
    auto r = gauss_jacobi01(12, beta);
    for (int k = 0; k < 20; ++k) {
      const double exact = 1.0 / (beta + k + 1);
      CHECK(r.integrate([k](double s) { return std::pow(s, k); }) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("parallel evaluation is bitwise reproducible") {
  double serial = picard_interior(0.1, Sign::focusing).value(0.37);
  double threaded = 0;
  std::thread t([&] { threaded = picard_interior(0.1, Sign::focusing).value(0.37); });
  t.join();
  CHECK(serial == threaded);
}
