#include "selfsim/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace selfsim {

namespace {

Eigen::VectorXd bary_weights(int n) {
  Eigen::VectorXd w(n + 1);
  for (int j = 0; j <= n; ++j) w[j] = (j % 2 == 0) ? 1.0 : -1.0;
  w[0] *= 0.5;
  w[n] *= 0.5;
  return w;
}

}  // namespace

ChebSeries::ChebSeries(double lo, double hi, Eigen::VectorXd values)
    : lo_(lo), hi_(hi), values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("ChebSeries needs at least two nodes");
  x_ = nodes(lo, hi, degree());
}

Eigen::VectorXd ChebSeries::nodes(double lo, double hi, int n) {
  Eigen::VectorXd x(n + 1);
  for (int j = 0; j <= n; ++j) {
    // sin form keeps the nodes symmetric and exact at the ends
    const double s = std::sin(std::numbers::pi * (2.0 * j - n) / (2.0 * n));
    x[j] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * s;
  }
  x[0] = lo;
  x[n] = hi;
  return x;
}

Eigen::RowVectorXd ChebSeries::interpolation_row(double lo, double hi, int n, double x) {
  const Eigen::VectorXd xs = nodes(lo, hi, n);
  const Eigen::VectorXd w = bary_weights(n);
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n + 1);
  for (int j = 0; j <= n; ++j) {
    if (x == xs[j]) {
      row[j] = 1.0;
      return row;
    }
  }
  double den = 0.0;
  for (int j = 0; j <= n; ++j) {
    row[j] = w[j] / (x - xs[j]);
    den += row[j];
  }
  return row / den;
}

Eigen::MatrixXd ChebSeries::differentiation_matrix(double lo, double hi, int n) {
  const Eigen::VectorXd xs = nodes(lo, hi, n);
  const Eigen::VectorXd w = bary_weights(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    double diag = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = (w[j] / w[i]) / (xs[i] - xs[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

double ChebSeries::operator()(double x) const {
  const int n = degree();
  double num = 0.0, den = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double dx = x - x_[j];
    if (dx == 0.0) return values_[j];
    double wj = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n) wj *= 0.5;
    const double t = wj / dx;
    num += t * values_[j];
    den += t;
  }
  return num / den;
}

ChebSeries ChebSeries::derivative() const {
  return ChebSeries(lo_, hi_, differentiation_matrix(lo_, hi_, degree()) * values_);
}

double ChebSeries::tail_ratio() const {
  // DCT-I of the node values (ascending nodes correspond to descending theta).
  const int n = degree();
  Eigen::VectorXd c(n + 1);
  for (int k = 0; k <= n; ++k) {
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
      double f = values_[n - j];
      if (j == 0 || j == n) f *= 0.5;
      acc += f * std::cos(std::numbers::pi * k * j / n);
    }
    c[k] = 2.0 * acc / n;
  }
  const double big = c.cwiseAbs().maxCoeff();
  if (big == 0.0) return 0.0;
  return std::max(std::abs(c[n]), std::abs(c[n - 1])) / big;
}

}  // namespace selfsim
