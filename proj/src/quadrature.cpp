#include "selfsim/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace selfsim {

GaussRule gauss_jacobi01(int n, double beta) {
  if (n < 1) throw std::invalid_argument("gauss rule needs n >= 1");
  if (!(beta > -1.0)) throw std::invalid_argument("gauss_jacobi01: beta must exceed -1");
  // Jacobi weight (1-x)^alpha (1+x)^b on [-1,1] with alpha = 0, b = beta,
  // mapped by s = (1+x)/2.
  const double al = 0.0, be = beta;
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + al + be;
    double diag;
    if (k == 0) {
      diag = (be - al) / (al + be + 2.0);
    } else {
      diag = (be * be - al * al) / (s * (s + 2.0));
    }
    jm(k, k) = diag;
    if (k + 1 < n) {
      const double kk = k + 1.0;
      const double s1 = 2.0 * kk + al + be;
      const double num = 4.0 * kk * (kk + al) * (kk + be) * (kk + al + be);
      const double den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
      const double off = std::sqrt(num / den);
      jm(k, k + 1) = off;
      jm(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
  // mu0 = ∫_{-1}^{1} (1+x)^beta dx = 2^{beta+1}/(beta+1); mapping to [0,1] rescales
  // by 2^{-beta-1}, so the total mass becomes 1/(beta+1).
  const double mass = 1.0 / (beta + 1.0);
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.x[i] = 0.5 * (1.0 + es.eigenvalues()[i]);
    rule.w[i] = mass * v0 * v0;
  }
  return rule;
}

GaussRule gauss_legendre(int n, double lo, double hi) {
  GaussRule r = gauss_legendre01(n);
  r.x = (lo + (hi - lo) * r.x.array()).matrix();
  r.w *= (hi - lo);
  return r;
}

}  // namespace selfsim
