#include "selfsim/newton.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"

namespace selfsim {

Eigen::Matrix2d fd_jacobian(const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& x,
                            double step) {
  Eigen::Matrix2d j;
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d xp = x, xm = x;
    xp[k] += step;
    xm[k] -= step;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return j;
}

Newton2Result newton2(const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f, Eigen::Vector2d x0,
                      Eigen::Matrix2d j0, const Newton2Options& opt) {
  Newton2Result res;
  res.x = x0;
  res.jacobian = j0;
  res.residual = f(x0);
  res.residual_norm = res.residual.norm();
  res.trail.push_back({x0[0], x0[1], res.residual_norm});
  int no_progress = 0;
  bool refreshed = false;
  for (int it = 1; it <= opt.max_iter && res.residual_norm > opt.tol; ++it) {
    res.iterations = it;
    const Eigen::Vector2d dx = -res.jacobian.fullPivLu().solve(res.residual);
    const Eigen::Vector2d xn = res.x + dx;
    const Eigen::Vector2d fn = f(xn);
    const double nn = fn.norm();
    if (!std::isfinite(nn)) break;
    // Broyden update uses the step even when it did not help
    const double dd = dx.squaredNorm();
    if (dd > 0) res.jacobian += ((fn - res.residual) - res.jacobian * dx) * dx.transpose() / dd;
    if (nn < res.residual_norm) {
      res.x = xn;
      res.residual = fn;
      res.residual_norm = nn;
      no_progress = 0;
    } else if (++no_progress >= 2) {
      if (refreshed) break;
      const double h = opt.fd_step_rel * std::max(1e-8, res.x.cwiseAbs().maxCoeff());
      res.jacobian = fd_jacobian(f, res.x, h);
      refreshed = true;
      no_progress = 0;
    }
    res.trail.push_back({res.x[0], res.x[1], res.residual_norm});
  }
  if (res.residual_norm > opt.accept || !std::isfinite(res.residual_norm)) {
    std::ostringstream os;
    os.precision(6);
    os << "Newton stagnation: residual " << res.residual_norm << " after " << res.iterations << " iterations";
    throw NewtonStagnation(os.str(), res.residual_norm, res.trail);
  }
  return res;
}

}  // namespace selfsim
