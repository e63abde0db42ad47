#pragma once

// Closed-form homogeneous solutions of
//   (a^2-1) Q'' + (8a/3 - 2/a) Q' + (4/9) Q = 0
// and the Green kernel built from them.

#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"
#include "selfsim/sign.hpp"

namespace selfsim {

enum class Region { interior, exterior };
enum class Branch { first, second };

template <typename Scalar>
struct Jet {
  Scalar value{};
  Scalar d1{};
  Scalar d2{};
};

namespace detail {

[[noreturn]] inline void domain_fail(const char* what, double a) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": a = " << a << " outside validity domain";
  throw DomainError(os.str());
}

// a^{-1} x^{2/3} with x = x0 + kappa a, kappa = ±1, x > 0.
template <typename Scalar>
Jet<Scalar> inv_a_two_thirds(Scalar a, Scalar x, Scalar kappa) {
  using std::cbrt;
  const Scalar c = cbrt(x);
  const Scalar p = c * c;
  const Scalar dp = Scalar(2) / 3 * kappa / c;
  const Scalar ddp = Scalar(-2) / 9 / (x * c);
  const Scalar ia = Scalar(1) / a;
  return {p * ia, dp * ia - p * ia * ia, ddp * ia - 2 * dp * ia * ia + 2 * p * ia * ia * ia};
}

}  // namespace detail

/// Fundamental pair.  Interior: φ1 = a^{-1}(1-a)^{2/3}, φ2 = a^{-1}(1+a)^{2/3} on (0,1).
/// Exterior: φ̃1 = a^{-1}(a-1)^{2/3} on (1,∞) with the same φ2.
struct FundamentalPair {
  Region kind = Region::interior;

  template <typename Scalar>
  Jet<Scalar> jet(Branch which, Scalar a) const {
    if (which == Branch::second) {
      if (!(a > 0)) detail::domain_fail("phi2", static_cast<double>(a));
      return detail::inv_a_two_thirds<Scalar>(a, 1 + a, Scalar(1));
    }
    if (kind == Region::interior) {
      if (!(a > 0 && a < 1)) detail::domain_fail("phi1", static_cast<double>(a));
      return detail::inv_a_two_thirds<Scalar>(a, 1 - a, Scalar(-1));
    }
    if (!(a > 1)) detail::domain_fail("phi1 (exterior)", static_cast<double>(a));
    return detail::inv_a_two_thirds<Scalar>(a, a - 1, Scalar(1));
  }
};

template <typename Scalar>
struct ValueDerivative {
  Scalar value{};
  Scalar derivative{};
};

template <typename Scalar>
ValueDerivative<Scalar> eval_fundamental(const FundamentalPair& pair, Branch which, Scalar a) {
  auto j = pair.jet(which, a);
  return {j.value, j.d1};
}

/// φ1 φ2' - φ1' φ2.  Interior (4/3)a^{-2}(1-a^2)^{-1/3}, exterior -(4/3)a^{-2}(a^2-1)^{-1/3}.
template <typename Scalar>
Scalar wronskian(const FundamentalPair& pair, Scalar a) {
  using std::cbrt;
  if (pair.kind == Region::interior) {
    if (!(a > 0 && a < 1)) detail::domain_fail("wronskian", static_cast<double>(a));
    return Scalar(4) / 3 / (a * a * cbrt(1 - a * a));
  }
  if (!(a > 1)) detail::domain_fail("wronskian (exterior)", static_cast<double>(a));
  return Scalar(-4) / 3 / (a * a * cbrt((a - 1) * (a + 1)));
}

/// Linear operator of the profile equation, without the Q^7 term.
template <typename Scalar>
Scalar linear_operator(Scalar q, Scalar dq, Scalar ddq, Scalar a) {
  return (a - 1) * (a + 1) * ddq + (Scalar(8) * a / 3 - 2 / a) * dq + Scalar(4) / 9 * q;
}

/// (a^2-1)Q'' + (8a/3 - 2/a)Q' + (4/9)Q + s Q^7.  At a = 0 the regular limit
/// (the 2Q'/a term replaced by 2Q'') is used.
template <typename Scalar>
Scalar ode_residual(Scalar q, Scalar dq, Scalar ddq, Scalar a, Sign sign) {
  const Scalar q2 = q * q;
  const Scalar q7 = q2 * q2 * q2 * q;
  const Scalar lin = a == Scalar(0) ? -3 * ddq + Scalar(4) / 9 * q : linear_operator(q, dq, ddq, a);
  return lin + Scalar(sign_factor(sign)) * q7;
}

/// Q0 = (3/4)(φ2 - φ1), written as 3 / ((1+a)^{4/3} + (1-a^2)^{2/3} + (1-a)^{4/3})
/// to avoid the cancellation at small a.  Even in a, Q0(0) = 1, valid on |a| <= 1.
template <typename Scalar>
Jet<Scalar> linear_seed(Scalar a) {
  using std::cbrt;
  if (!(a >= -1 && a <= 1)) detail::domain_fail("linear_seed", static_cast<double>(a));
  const Scalar cp = cbrt(1 + a), cm = cbrt(1 - a), c2 = cp * cm;
  const Scalar den = cp * cp * cp * cp + c2 * c2 + cm * cm * cm * cm;
  const Scalar value = 3 / den;
  if (a == Scalar(1) || a == Scalar(-1)) return {value, Scalar(NAN), Scalar(NAN)};
  // Derivatives from the closed form (3/4)(φ2 - φ1) away from a = 0, series at 0.
  const Scalar aa = a < 0 ? -a : a;
  if (aa < Scalar(1e-3)) {
    // Q0 = 1 + (2/27) a^2 + ... ; Q0'' from the even series.
    const Scalar c2coef = Scalar(2) / 27;
    const Scalar c4coef = Scalar(7) / 243;
    return {value, 2 * c2coef * a + 4 * c4coef * a * a * a, 2 * c2coef + 12 * c4coef * a * a};
  }
  FundamentalPair pair{Region::interior};
  const Scalar sgn = a < 0 ? Scalar(-1) : Scalar(1);
  auto j1 = pair.jet(Branch::first, aa);
  auto j2 = pair.jet(Branch::second, aa);
  return {value, sgn * Scalar(0.75) * (j2.d1 - j1.d1), Scalar(0.75) * (j2.d2 - j1.d2)};
}

/// Green kernel G(a,b) = (φ1(b)φ2(a) - φ1(a)φ2(b)) / ((b^2-1) W(b)), common to both sides:
///   G(a,b) = -(3/4)(b/a)[ |1-a|^{2/3}|1-b|^{-2/3} - ((1+a)/(1+b))^{2/3} ].
/// Split G = g1 + (|1-a|/|1-b|)^{2/3} g2 with g1 = (3/4)(b/a)((1+a)/(1+b))^{2/3}, g2 = -(3/4)(b/a).
struct GreenKernel {
  Region kind = Region::interior;
  FundamentalPair pair{Region::interior};

  explicit GreenKernel(Region k = Region::interior) : kind(k), pair{k} {}

  template <typename Scalar>
  Scalar g1(Scalar a, Scalar b) const {
    using std::cbrt;
    const Scalar c = cbrt((1 + a) / (1 + b));
    return Scalar(0.75) * (b / a) * c * c;
  }

  template <typename Scalar>
  Scalar g2(Scalar a, Scalar b) const {
    return Scalar(-0.75) * (b / a);
  }

  template <typename Scalar>
  Scalar operator()(Scalar a, Scalar b) const {
    using std::cbrt;
    using std::abs;
    check(a, b);
    const Scalar c = cbrt(abs(1 - a) / abs(1 - b));
    return g1(a, b) + c * c * g2(a, b);
  }

  /// G̃(a,u) = G(a, a u) for the interior substitution b = a u, u in [0,1].
  template <typename Scalar>
  Scalar rescaled(Scalar a, Scalar u) const {
    using std::cbrt;
    const Scalar cm = cbrt((1 - a) / (1 - a * u));
    const Scalar cp = cbrt((1 + a) / (1 + a * u));
    return Scalar(-0.75) * u * (cm * cm - cp * cp);
  }

  template <typename Scalar>
  Scalar wronskian(Scalar a) const {
    return selfsim::wronskian(pair, a);
  }

 private:
  template <typename Scalar>
  void check(Scalar a, Scalar b) const {
    if (!(a > 0) || !(b > 0)) detail::domain_fail("green kernel", static_cast<double>(a <= 0 ? a : b));
    if (b == Scalar(1)) detail::domain_fail("green kernel at b = 1", 1.0);
    if (kind == Region::interior && !(a < 1 && b < 1))
      detail::domain_fail("interior green kernel", static_cast<double>(a >= 1 ? a : b));
    if (kind == Region::exterior && !(a > 1 && b > 1))
      detail::domain_fail("exterior green kernel", static_cast<double>(a <= 1 ? a : b));
  }
};

}  // namespace selfsim
