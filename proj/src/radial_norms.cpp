#include "selfsim/radial_norms.hpp"

#include <cmath>
#include <numbers>

#include "selfsim/errors.hpp"
#include "selfsim/quadrature.hpp"

namespace selfsim {

double radial_lp_integral(const std::function<double(double)>& f, const std::vector<double>& breaks, double p,
                          int points_per_panel) {
  if (breaks.size() < 2) throw Error("radial_lp_integral: need at least one panel");
  const GaussRule g = gauss_legendre01(points_per_panel);
  double acc = 0.0;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double lo = breaks[i - 1], hi = breaks[i];
    if (!(hi > lo)) continue;
    for (int k = 0; k < points_per_panel; ++k) {
      const double r = lo + (hi - lo) * g.x[k];
      acc += (hi - lo) * g.w[k] * std::pow(std::abs(f(r)), p) * r * r;
    }
  }
  return acc;
}

double radial_lp_norm(const std::function<double(double)>& f, const std::vector<double>& breaks, double p,
                      int points_per_panel) {
  if (std::isinf(p)) {
    const GaussRule g = gauss_legendre01(points_per_panel);
    double m = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i)
      for (int k = 0; k < points_per_panel; ++k)
        m = std::max(m, std::abs(f(breaks[i - 1] + (breaks[i] - breaks[i - 1]) * g.x[k])));
    return m;
  }
  return std::pow(4.0 * std::numbers::pi * radial_lp_integral(f, breaks, p, points_per_panel), 1.0 / p);
}

}  // namespace selfsim
