#pragma once

#include <array>

#include "selfsim/chebyshev.hpp"
#include "selfsim/fundamental.hpp"
#include "selfsim/provenance.hpp"
#include "selfsim/sign.hpp"

namespace selfsim {

enum class ConeSide { left_of_cone, right_of_cone };

/// Q(a) = d^{2/3} Q1(a) + Q2(a) + d^{p3/3} Q3(a), d = |1-a|, on a bounded interval
/// with one endpoint at a = 1.  Components are smooth and stored as Chebyshev series.
class SingularExpansion {
 public:
  struct Component {
    ChebSeries f, df, ddf;
  };
  struct ComponentValues {
    std::array<double, 3> v{}, d1{}, d2{};
  };

  SingularExpansion() = default;
  SingularExpansion(ConeSide side, std::array<ChebSeries, 3> comps, int p3_thirds, std::array<double, 2> leading,
                    Provenance prov);

  ConeSide side() const { return side_; }
  double lo() const { return comps_[0].f.lo(); }
  double hi() const { return comps_[0].f.hi(); }
  /// Powers of |1-a| multiplying (Q1, Q2, Q3), as thirds.
  std::array<int, 3> exponents_thirds() const { return {2, 0, p3_}; }
  std::array<double, 2> leading() const { return leading_; }
  double cone_value() const { return comps_[1].f(1.0); }

  ComponentValues components(double a) const;
  const Component& component(int i) const { return comps_[static_cast<std::size_t>(i)]; }

  double value(double a) const;
  /// Q, Q', Q'' of the assembled profile; a = 1 is excluded for the derivatives.
  Jet<double> jet(double a) const;

  const Provenance& provenance() const { return prov_; }
  Provenance& provenance() { return prov_; }

 private:
  void check(double a) const;
  ConeSide side_ = ConeSide::left_of_cone;
  std::array<Component, 3> comps_{};
  int p3_ = 7;
  std::array<double, 2> leading_{0.0, 0.0};
  Provenance prov_;
};

struct NearConeProblem {
  ConeSide side = ConeSide::left_of_cone;
  double length = 0.5;   // interval [1-length, 1] or [1, 1+length]
  double c1 = 0.0;       // coefficient of d^{2/3}/a
  double c2 = 0.0;       // value of Q2 at the cone
  Sign sign = Sign::defocusing;
  int p3_thirds = 7;
  int degree = 32;
  int quad_points = 40;
  double tol = 1e-13;
  int max_iter = 500;
  int stall_limit = 10;
};

/// Picard iteration for the three-component Green-integral system near the cone:
///   Q1 = c1/a + κ s d ∫_0^1 [g1 u^{2/3} + g2] N1 du
///   Q2 = c2 2^{-2/3} φ2(a) + κ s d ∫_0^1 [g1 + g2 u^{-2/3}] N0 du
///   Q3 = κ s d^{(7-p3)/3} ∫_0^1 [g1 u^{4/3} + g2 u^{2/3}] N2 du
/// with b = 1 + κ d u, κ = -1 left of the cone and +1 right of it.
/// The fractional weights are absorbed into Gauss–Jacobi rules.
SingularExpansion solve_near_cone(const NearConeProblem& problem);

}  // namespace selfsim
