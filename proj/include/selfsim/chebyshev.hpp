#pragma once

#include <Eigen/Dense>

namespace selfsim {

/// Polynomial interpolant through Chebyshev–Lobatto points on [lo, hi],
/// evaluated in barycentric form.  Nodes are stored in ascending order.
class ChebSeries {
 public:
  ChebSeries() = default;
  ChebSeries(double lo, double hi, Eigen::VectorXd values);

  /// n+1 ascending Lobatto nodes on [lo, hi].
  static Eigen::VectorXd nodes(double lo, double hi, int n);

  /// Row r such that r · values = p(x) for any values on the n+1 nodes.
  static Eigen::RowVectorXd interpolation_row(double lo, double hi, int n, double x);

  /// Spectral differentiation matrix on the n+1 nodes.
  static Eigen::MatrixXd differentiation_matrix(double lo, double hi, int n);

  double operator()(double x) const;
  ChebSeries derivative() const;

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  int degree() const noexcept { return static_cast<int>(values_.size()) - 1; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  const Eigen::VectorXd& grid() const noexcept { return x_; }

  /// Magnitude of the highest Chebyshev coefficients relative to the largest one.
  double tail_ratio() const;

 private:
  double lo_ = 0.0, hi_ = 1.0;
  Eigen::VectorXd x_, values_;
};

}  // namespace selfsim
