#pragma once

#include <functional>
#include <vector>

namespace selfsim {

/// (4π ∫ |f(r)|^p r^2 dr)^{1/p} by Gauss–Legendre on each panel between consecutive breakpoints.
/// p = ∞ returns the maximum over the quadrature nodes.
double radial_lp_norm(const std::function<double(double)>& f, const std::vector<double>& breaks, double p,
                      int points_per_panel = 32);

/// ∫ |f|^p r^2 dr without the outer root and 4π, for assembling mixed norms.
double radial_lp_integral(const std::function<double(double)>& f, const std::vector<double>& breaks, double p,
                          int points_per_panel = 32);

}  // namespace selfsim
