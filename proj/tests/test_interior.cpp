#include <doctest.h>

#include <cmath>
#include <thread>

#include "selfsim/fit.hpp"
#include "selfsim/interior.hpp"
#include "selfsim/oracle.hpp"

using namespace selfsim;

namespace {

double seed(double a) { return linear_seed(a).value; }

double phi1(double a) { return std::pow(1 - a, 2.0 / 3) / a; }
double phi2(double a) { return std::pow(1 + a, 2.0 / 3) / a; }

double max_residual(const SingularExpansion& e, double lo, double hi, Sign sign) {
  double worst = 0;
  for (int i = 0; i <= 200; ++i) {
    const double a = lo + (hi - lo) * i / 200;
    auto j = e.jet(a);
    worst = std::max(worst, std::abs(ode_residual(j.value, j.d1, j.d2, a, sign)));
  }
  return worst;
}

}  // namespace

TEST_CASE("picard interior: zero and linear regime") {
  auto z = picard_interior(0.0, Sign::defocusing);
  for (double a : {0.0, 0.2, 0.5}) CHECK(z.value(a) == 0.0);

  // Q0(1/2) = (3/4)(φ2 - φ1) at 1/2
  const double q0_half = 0.75 * (phi2(0.5) - phi1(0.5));
  CHECK(q0_half == doctest::Approx(1.020615).epsilon(1e-6));
  CHECK(seed(0.5) == doctest::Approx(q0_half).epsilon(1e-14));
  auto p = picard_interior(0.01, Sign::defocusing);
  CHECK(std::abs(p.value(0.5) - 0.01 * q0_half) < 1e-13);
  CHECK(p.value(0.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(std::abs(p.derivative(0.0)) < 1e-13);
}

TEST_CASE("picard interior: sign of the nonlinearity enters at seventh order") {
  auto d = picard_interior(0.1, Sign::defocusing);
  auto f = picard_interior(0.1, Sign::focusing);
  auto od = oracle_integrate(interior_series(0.1, Sign::defocusing, 0.01), 0.5 - 1e-9, Sign::defocusing);
  auto of = oracle_integrate(interior_series(0.1, Sign::focusing, 0.01), 0.5 - 1e-9, Sign::focusing);
  double sup = 0;
  for (int i = 0; i <= 50; ++i) sup = std::max(sup, std::abs(d.value(0.01 * i) - f.value(0.01 * i)));
  CHECK(sup < 1e-5);
  CHECK(sup > 1e-9);
  const double a = 0.45;
  CHECK((d.value(a) - f.value(a)) == doctest::Approx(od(a).q - of(a).q).epsilon(1e-6));
}

TEST_CASE("picard interior: amplitude limits") {
  CHECK_THROWS_AS(picard_interior(0.5, Sign::defocusing), DomainError);
  InteriorOptions loose;
  loose.enforce_q_max = false;
  CHECK_THROWS_AS(picard_interior(5.0, Sign::focusing, loose), ContractionFailure);
  try {
    picard_interior(5.0, Sign::focusing, loose);
  } catch (const ContractionFailure& e) {
    CHECK(std::string(e.what()).find("q0 too large") != std::string::npos);
  }
}

TEST_CASE("picard interior: structure of the nonlinear correction") {
  // |Q - q0 Q0| <= K q0^7 a^2 with a single K for all amplitudes
  std::vector<double> ks;
  for (double q0 : {0.02, 0.05, 0.1, 0.2}) {
    auto p = picard_interior(q0, Sign::defocusing);
    double k = 0;
    for (int i = 1; i <= 50; ++i) {
      const double a = 0.01 * i;
      k = std::max(k, std::abs(p.value(a) - q0 * seed(a)) / (std::pow(q0, 7) * a * a));
    }
    ks.push_back(k);
  }
  const double kmax = *std::max_element(ks.begin(), ks.end());
  const double kmin = *std::min_element(ks.begin(), ks.end());
  CHECK(kmax < 1.0);
  CHECK(kmin > 0.5 * kmax);
}

TEST_CASE("picard interior: defocusing profile is nondecreasing") {
  auto p = picard_interior(0.15, Sign::defocusing);
  for (int i = 1; i <= 100; ++i) CHECK(p.derivative(0.005 * i) >= 0);
}

TEST_CASE("picard interior: fixed-point consistency") {
  InteriorOptions opt;
  for (Sign sg : {Sign::defocusing, Sign::focusing}) {
    auto p = picard_interior(0.1, sg, opt);
    double worst = 0;
    for (int i = 0; i <= 25; ++i) {
      const double a = 0.02 * i;
      worst = std::max(worst, std::abs(interior_map(p, 0.1, sg, a) - p.value(a)));
    }
    CHECK(worst < 2 * opt.tol);
  }
}

TEST_CASE("near-cone interior expansion") {
  SUBCASE("zero coefficients") {
    auto e = near_cone_interior(0.0, 0.0, Sign::defocusing);
    for (double a : {0.5, 0.8, 0.999}) {
      auto c = e.components(a);
      for (int i = 0; i < 3; ++i) CHECK(c.v[static_cast<std::size_t>(i)] == 0.0);
    }
  }
  SUBCASE("linear part at a = 1/2") {
    // the remainder is the seventh-order term: O(1e-13) at 0.01, scaling like q^7
    auto gap = [](double q) {
      auto e = near_cone_interior(q, q, Sign::defocusing);
      return e.value(0.5) - (q * phi1(0.5) + q * std::pow(2.0, -2.0 / 3) * phi2(0.5));
    };
    CHECK(std::abs(gap(0.01)) < 1e-12);
    CHECK(gap(0.04) / gap(0.02) == doctest::Approx(128.0).epsilon(0.02));
  }
  SUBCASE("leading coefficients and exponents") {
    auto e = near_cone_interior(0.01, 0.02, Sign::focusing);
    CHECK(e.components(1.0).v[0] == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(e.components(1.0).v[1] == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(std::abs(e.components(1.0).v[2]) < 1e-10);
    CHECK(e.exponents_thirds() == std::array<int, 3>{2, 0, 7});
    CHECK(e.side() == ConeSide::left_of_cone);
    CHECK(max_residual(e, 0.5, 0.999, Sign::focusing) < 1e-6);
  }
  SUBCASE("oracle reproduces the assembled profile") {
    auto e = near_cone_interior(0.05, -0.03, Sign::defocusing);
    auto j = e.jet(0.55);
    auto o = oracle_integrate(OdeState{0.55, j.value, j.d1}, 0.999, Sign::defocusing);
    for (double a : {0.6, 0.8, 0.95, 0.99, 0.999}) CHECK(std::abs(o(a).q - e.value(a)) < 1e-7);
  }
  SUBCASE("large coefficients are refused") {
    CHECK_THROWS(near_cone_interior(0.5, 0.01, Sign::defocusing));
  }
}

TEST_CASE("singular exponent fit") {
  auto synthetic = [](double p) {
    return [p](double a) { return 0.3 * std::pow(1 - a, p) + 0.1; };
  };
  auto f23 = fit_singular_exponent(synthetic(2.0 / 3), 0.1, ConeSide::left_of_cone, 1e-6, 1e-2);
  CHECK(f23.exponent == doctest::Approx(2.0 / 3).epsilon(1e-6));
  CHECK(f23.pure_slope == doctest::Approx(2.0 / 3).epsilon(1e-6));
  auto f12 = fit_singular_exponent(synthetic(0.5), 0.1, ConeSide::left_of_cone, 1e-6, 1e-2);
  CHECK(f12.exponent == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(f12.exponent - 2.0 / 3) > 0.1);

  auto e = near_cone_interior(0.01, 0.02, Sign::defocusing);
  auto fe = fit_singular_exponent([&](double a) { return e.value(a); }, e.cone_value(), ConeSide::left_of_cone, 1e-6,
                                  1e-2);
  CHECK(std::abs(fe.exponent - 2.0 / 3) < 0.01);
  CHECK(fe.ci95_half < 0.01);

  CHECK_THROWS_AS(fit_singular_exponent(synthetic(0.5), 0.1, ConeSide::left_of_cone, 1e-3, 1.1e-3), FitError);
}

TEST_CASE("matching at a = 1/2") {
  auto z = match_at_half(0.0, Sign::defocusing);
  CHECK(z.q1 == 0.0);
  CHECK(z.q2 == 0.0);

  auto m = match_at_half(0.01, Sign::defocusing);
  CHECK(m.newton_residual < 1e-10);
  CHECK(m.q1 != 0.0);
  CHECK(m.q2 != 0.0);
  CHECK(std::abs(m.q1) < 0.1);
  CHECK(std::abs(m.q2) < 0.1);
  CHECK(std::abs(m.inner.value(0.5) - m.outer.value(0.5)) < 1e-12);
  CHECK(std::abs(m.inner.derivative(0.5) - m.outer.jet(0.5).d1) < 1e-10);
  CHECK(std::abs(m.jacobian.determinant()) > 0);

  const double r = match_at_half(0.002, Sign::focusing).q1 / match_at_half(0.001, Sign::focusing).q1;
  CHECK(std::abs(r - 2) < 1e-3);
}

TEST_CASE("assembled interior agrees with the oracle") {
  auto m = match_at_half(0.1, Sign::focusing);
  auto s = m.inner.jet(0.05);
  auto o = oracle_integrate(OdeState{0.05, s.value, s.d1}, 0.999, Sign::focusing);
  double worst = 0;
  for (int i = 0; i <= 100; ++i) {
    const double a = 0.05 + (0.999 - 0.05) * i / 100;
    const double q = a <= 0.5 ? m.inner.value(a) : m.outer.value(a);
    worst = std::max(worst, std::abs(q - o(a).q));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("q0 sweep is bitwise reproducible across threads") {
  std::vector<double> q0s = {0.01, 0.05, 0.1};
  std::vector<double> serial, threaded(q0s.size());
  for (double q : q0s) serial.push_back(match_at_half(q, Sign::defocusing).q2);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < q0s.size(); ++i)
    pool.emplace_back([&, i] { threaded[i] = match_at_half(q0s[i], Sign::defocusing).q2; });
  for (auto& t : pool) t.join();
  CHECK(serial == threaded);
}

TEST_CASE("contraction boundary lies above the shipped q_max") {
  const double b = calibrate_q_boundary(Sign::focusing, 2.0, 12);
  CHECK(b > InteriorOptions{}.q_max);
}
