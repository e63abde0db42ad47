#pragma once

#include <functional>
#include <vector>

#include "selfsim/chebyshev.hpp"
#include "selfsim/fundamental.hpp"
#include "selfsim/provenance.hpp"

namespace selfsim {

/// Piecewise Chebyshev representation of Q and Q' on [lo, hi].
/// Each panel stores node values of Q and of Q'; interpolation order is the
/// panel degree, and Q' comes from its own node values (not re-differentiated).
class SampledProfile {
 public:
  struct Panel {
    ChebSeries q;
    ChebSeries dq;
    ChebSeries ddq;
  };

  SampledProfile() = default;
  SampledProfile(std::vector<Panel> panels, Provenance prov);

  /// Single panel from values of Q on Lobatto nodes; Q' and Q'' by spectral differentiation.
  static SampledProfile from_values(double lo, double hi, const Eigen::VectorXd& q, Provenance prov);

  /// Piecewise Chebyshev fit of a (Q, Q', Q'') evaluator on [lo, hi].  Starts from the
  /// given breakpoints and bisects panels until the trailing Chebyshev coefficients of Q
  /// fall below rel_tol of the panel scale (or the panel count reaches max_panels).
  static SampledProfile adaptive(const std::function<Jet<double>(double)>& f, std::vector<double> breaks, int degree,
                                 double rel_tol, Provenance prov, std::size_t max_panels = 20000);

  double lo() const;
  double hi() const;
  int order() const;
  bool empty() const { return panels_.empty(); }

  double value(double a) const;
  double derivative(double a) const;
  double second_derivative(double a) const;
  Jet<double> jet(double a) const;

  const std::vector<Panel>& panels() const { return panels_; }
  const Provenance& provenance() const { return prov_; }

 private:
  const Panel& panel_for(double a) const;
  std::vector<Panel> panels_;
  Provenance prov_;
};

}  // namespace selfsim
