#pragma once

#include <Eigen/Dense>

namespace selfsim {

/// Nodes and weights for ∫_0^1 s^beta f(s) ds ≈ Σ w_i f(x_i).
struct GaussRule {
  Eigen::VectorXd x;
  Eigen::VectorXd w;

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += w[i] * f(x[i]);
    return acc;
  }
};

/// Gauss–Jacobi rule with weight s^beta on [0,1] (beta > -1) by Golub–Welsch.
GaussRule gauss_jacobi01(int n, double beta);

inline GaussRule gauss_legendre01(int n) { return gauss_jacobi01(n, 0.0); }

/// Gauss–Legendre on [lo, hi].
GaussRule gauss_legendre(int n, double lo, double hi);

}  // namespace selfsim
