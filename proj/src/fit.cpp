#include "selfsim/fit.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "selfsim/errors.hpp"

namespace selfsim {

double student_t975(int dof) {
  static constexpr double table[] = {12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646, 2.3060, 2.2622,
                                     2.2281,  2.2010, 2.1788, 2.1604, 2.1448, 2.1314, 2.1199, 2.1098, 2.1009,
                                     2.0930,  2.0860, 2.0796, 2.0739, 2.0687, 2.0639, 2.0595, 2.0555, 2.0518,
                                     2.0484,  2.0452, 2.0423};
  if (dof < 1) return INFINITY;
  if (dof <= 30) return table[dof - 1];
  // Cornish–Fisher expansion about the normal quantile
  const double z = 1.959963984540054, v = dof;
  return z + (z * z * z + z) / (4 * v) + (5 * std::pow(z, 5) + 16 * z * z * z + 3 * z) / (96 * v * v);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 3 || y.size() != x.size()) throw FitError("fit_line: need at least three matched samples");
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw FitError("fit_line: degenerate abscissae");
  LineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / n);
  f.slope_stderr = std::sqrt(ss / (n - 2) / sxx);
  f.ci95_half = student_t975(n - 2) * f.slope_stderr;
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || y[i] == 0 || !std::isfinite(y[i])) throw FitError("fit_loglog: nonpositive or zero sample");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
  }
  return fit_line(lx, ly);
}

namespace {

struct Projected {
  double a, b, c, ss;
};

Projected project(const std::vector<double>& x, const std::vector<double>& y, double p) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd m(n, 3);
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 / std::abs(y[i]);
    m(i, 0) = w * std::pow(x[i], p);
    m(i, 1) = w * x[i];
    m(i, 2) = w * std::pow(x[i], p + 1.0);
    r[i] = w * y[i];
  }
  const Eigen::Vector3d c = m.colPivHouseholderQr().solve(r);
  return {c[0], c[1], c[2], (m * c - r).squaredNorm()};
}

}  // namespace

PowerLinearFit fit_power_plus_linear(const std::vector<double>& x, const std::vector<double>& y, double p_lo,
                                     double p_hi) {
  const int n = static_cast<int>(x.size());
  if (n < 10 || y.size() != x.size()) throw FitError("fit_power_plus_linear: need at least ten samples");
  for (int i = 0; i < n; ++i)
    if (!(x[i] > 0) || y[i] == 0 || !std::isfinite(y[i])) throw FitError("fit_power_plus_linear: bad sample");
  // coarse scan then golden section on the profiled residual
  const int scan = 200;
  double best_p = p_lo, best = INFINITY;
  for (int k = 0; k <= scan; ++k) {
    const double p = p_lo + (p_hi - p_lo) * k / scan;
    if (std::abs(p - 1.0) < 1e-6) continue;
    const double ss = project(x, y, p).ss;
    if (ss < best) {
      best = ss;
      best_p = p;
    }
  }
  const double step = (p_hi - p_lo) / scan;
  double lo = std::max(p_lo, best_p - step), hi = std::min(p_hi, best_p + step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = project(x, y, c).ss, fd = project(x, y, d).ss;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = project(x, y, c).ss;
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = project(x, y, d).ss;
    }
  }
  PowerLinearFit f;
  f.n = n;
  f.exponent = 0.5 * (lo + hi);
  const Projected pr = project(x, y, f.exponent);
  f.amplitude = pr.a;
  f.linear = pr.b;
  f.next = pr.c;
  f.rms_relative_residual = std::sqrt(pr.ss / n);
  // linearized covariance in (A, B, p) with relative weights
  Eigen::MatrixXd jac(n, 4);
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 / std::abs(y[i]);
    const double xp = std::pow(x[i], f.exponent);
    jac(i, 0) = w * xp;
    jac(i, 1) = w * x[i];
    jac(i, 2) = w * xp * x[i];
    jac(i, 3) = w * (pr.a + pr.c * x[i]) * xp * std::log(x[i]);
  }
  const double sigma2 = n > 4 ? pr.ss / (n - 4) : 0.0;
  const Eigen::Matrix4d cov = sigma2 * (jac.transpose() * jac).inverse();
  f.exponent_stderr = std::sqrt(std::max(0.0, cov(3, 3)));
  f.ci95_half = student_t975(n - 4) * f.exponent_stderr;
  return f;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * i / std::max(1, n - 1));
  if (n > 0) {
    v.front() = lo;
    v.back() = hi;
  }
  return v;
}

}  // namespace selfsim
