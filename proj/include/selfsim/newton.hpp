#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace selfsim {

struct Newton2Options {
  double tol = 1e-14;       // absolute residual target
  double accept = 1e-10;    // residual below which a stall still counts as success
  int max_iter = 60;
  double fd_step_rel = 1e-6;
};

struct Newton2Result {
  Eigen::Vector2d x;
  Eigen::Vector2d residual;
  double residual_norm = 0;
  int iterations = 0;
  Eigen::Matrix2d jacobian;
  std::vector<std::vector<double>> trail;  // (x0, x1, |F|) per iterate
};

/// Quasi-Newton on F: R^2 -> R^2 starting from an analytic Jacobian guess, with
/// Broyden rank-one updates and a finite-difference refresh when progress stalls.
/// Throws NewtonStagnation if the residual cannot be pushed below opt.accept.
Newton2Result newton2(const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f, Eigen::Vector2d x0,
                      Eigen::Matrix2d j0, const Newton2Options& opt = {});

/// Central finite-difference Jacobian.
Eigen::Matrix2d fd_jacobian(const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& x,
                            double step);

}  // namespace selfsim
