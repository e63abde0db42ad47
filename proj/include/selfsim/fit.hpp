#pragma once

#include <vector>

namespace selfsim {

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
double student_t975(int dof);

struct LineFit {
  double slope = 0, intercept = 0;
  double slope_stderr = 0;
  double ci95_half = 0;  // half-width of the 95% interval on the slope
  double rms_residual = 0;
  int n = 0;
};

/// Ordinary least squares y = intercept + slope x.  Throws FitError for n < 3.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// log|y| against log x.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct PowerLinearFit {
  double exponent = 0, amplitude = 0, linear = 0, next = 0;
  double exponent_stderr = 0, ci95_half = 0;
  double rms_relative_residual = 0;
  int n = 0;
};

/// y ≈ A x^p + B x + C x^{p+1} by variable projection in p with relative residuals.
PowerLinearFit fit_power_plus_linear(const std::vector<double>& x, const std::vector<double>& y, double p_lo = 0.05,
                                     double p_hi = 1.5);

/// n log-spaced points in [lo, hi].
std::vector<double> logspace(double lo, double hi, int n);

}  // namespace selfsim
