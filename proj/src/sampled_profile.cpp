#include "selfsim/sampled_profile.hpp"

#include <algorithm>
#include <sstream>

#include "selfsim/errors.hpp"

namespace selfsim {

SampledProfile::SampledProfile(std::vector<Panel> panels, Provenance prov)
    : panels_(std::move(panels)), prov_(std::move(prov)) {
  for (std::size_t i = 1; i < panels_.size(); ++i)
    if (panels_[i].q.lo() != panels_[i - 1].q.hi()) throw Error("SampledProfile panels are not contiguous");
}

SampledProfile SampledProfile::from_values(double lo, double hi, const Eigen::VectorXd& q, Provenance prov) {
  ChebSeries s(lo, hi, q);
  ChebSeries d = s.derivative();
  ChebSeries dd = d.derivative();
  std::vector<Panel> p{Panel{std::move(s), std::move(d), std::move(dd)}};
  return SampledProfile(std::move(p), std::move(prov));
}

SampledProfile SampledProfile::adaptive(const std::function<Jet<double>(double)>& f, std::vector<double> breaks,
                                        int degree, double rel_tol, Provenance prov, std::size_t max_panels) {
  if (breaks.size() < 2) throw Error("SampledProfile::adaptive needs at least one interval");
  auto make = [&](double lo, double hi) {
    const Eigen::VectorXd x = ChebSeries::nodes(lo, hi, degree);
    Eigen::VectorXd q(degree + 1), dq(degree + 1), ddq(degree + 1);
    for (int j = 0; j <= degree; ++j) {
      const Jet<double> jt = f(x[j]);
      q[j] = jt.value;
      dq[j] = jt.d1;
      ddq[j] = jt.d2;
    }
    return Panel{ChebSeries(lo, hi, q), ChebSeries(lo, hi, dq), ChebSeries(lo, hi, ddq)};
  };
  std::vector<Panel> done;
  // depth-first in ascending order keeps the panel list sorted
  std::vector<std::pair<double, double>> stack;
  for (std::size_t i = breaks.size() - 1; i > 0; --i) stack.emplace_back(breaks[i - 1], breaks[i]);
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    Panel p = make(lo, hi);
    const bool fine = p.q.tail_ratio() <= rel_tol && p.dq.tail_ratio() <= 100.0 * rel_tol;
    if (fine || done.size() + stack.size() >= max_panels || hi - lo <= 1e-12 * std::max(1.0, std::abs(lo))) {
      done.push_back(std::move(p));
    } else {
      const double mid = 0.5 * (lo + hi);
      stack.emplace_back(mid, hi);
      stack.emplace_back(lo, mid);
    }
  }
  prov.params["panels"] = static_cast<double>(done.size());
  prov.params["degree"] = degree;
  return SampledProfile(std::move(done), std::move(prov));
}

double SampledProfile::lo() const { return panels_.front().q.lo(); }
double SampledProfile::hi() const { return panels_.back().q.hi(); }
int SampledProfile::order() const { return panels_.empty() ? 0 : panels_.front().q.degree(); }

const SampledProfile::Panel& SampledProfile::panel_for(double a) const {
  if (panels_.empty()) throw Error("empty SampledProfile");
  if (a < lo() || a > hi()) {
    std::ostringstream os;
    os.precision(17);
    os << "SampledProfile: a = " << a << " outside [" << lo() << ", " << hi() << "]";
    throw DomainError(os.str());
  }
  auto it = std::lower_bound(panels_.begin(), panels_.end(), a,
                             [](const Panel& p, double v) { return p.q.hi() < v; });
  if (it == panels_.end()) it = std::prev(panels_.end());
  return *it;
}

double SampledProfile::value(double a) const { return panel_for(a).q(a); }
double SampledProfile::derivative(double a) const { return panel_for(a).dq(a); }
double SampledProfile::second_derivative(double a) const { return panel_for(a).ddq(a); }

Jet<double> SampledProfile::jet(double a) const {
  const Panel& p = panel_for(a);
  return {p.q(a), p.dq(a), p.ddq(a)};
}

}  // namespace selfsim
