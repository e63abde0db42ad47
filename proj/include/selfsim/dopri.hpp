#pragma once

// Dormand–Prince 5(4) with the standard continuous extension.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "selfsim/errors.hpp"

namespace selfsim {

struct DopriOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double initial_step = 0.0;  // 0 selects a heuristic
  double min_step_rel = 1e-13;  // relative to max(1, |x|)
  long max_steps = 5'000'000;
};

template <int N>
class DenseTrajectory {
 public:
  using State = Eigen::Matrix<double, N, 1>;

  struct Segment {
    double x0, h;
    State r1, r2, r3, r4, r5;
  };

  double start() const { return x_start_; }
  double end() const { return x_end_; }
  const State& final_state() const { return y_end_; }
  long steps() const { return static_cast<long>(segs_.size()); }
  long rejected() const { return rejected_; }

  State operator()(double x) const {
    if (segs_.empty()) return y_end_;
    const bool fwd = x_end_ >= x_start_;
    // locate the segment containing x
    auto it = std::lower_bound(segs_.begin(), segs_.end(), x, [fwd](const Segment& s, double v) {
      return fwd ? s.x0 + s.h < v : s.x0 + s.h > v;
    });
    if (it == segs_.end()) it = std::prev(segs_.end());
    const Segment& s = *it;
    const double th = (x - s.x0) / s.h, th1 = 1.0 - th;
    return s.r1 + th * (s.r2 + th1 * (s.r3 + th * (s.r4 + th1 * s.r5)));
  }

  /// Step boundaries including the start point.
  std::vector<double> mesh() const {
    std::vector<double> m{x_start_};
    for (const auto& s : segs_) m.push_back(s.x0 + s.h);
    return m;
  }

  // construction interface used by the integrator
  void begin(double x0, double x1, const State& y0) {
    x_start_ = x0;
    x_end_ = x1;
    y_end_ = y0;
  }
  void push(const Segment& s) { segs_.push_back(s); }
  void finish(double x, const State& y) {
    x_end_ = x;
    y_end_ = y;
  }
  void count_rejection() { ++rejected_; }

 private:
  double x_start_ = 0, x_end_ = 0;
  State y_end_;
  std::vector<Segment> segs_;
  long rejected_ = 0;
};

/// Integrates y' = f(x, y) from x0 to x1 (either direction).  The optional observer sees
/// each accepted step and may stop the integration early by returning false.
template <int N, typename F>
DenseTrajectory<N> dopri5(F&& f, double x0, const Eigen::Matrix<double, N, 1>& y0, double x1,
                          const DopriOptions& opt = {},
                          const std::function<bool(double, const Eigen::Matrix<double, N, 1>&)>& observer = {}) {
  using State = Eigen::Matrix<double, N, 1>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  DenseTrajectory<N> out;
  out.begin(x0, x1, y0);
  if (x1 == x0) return out;
  const double dir = x1 > x0 ? 1.0 : -1.0;
  const double span = std::abs(x1 - x0);

  auto err_norm = [&](const State& err, const State& ya, const State& yb) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      acc += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
  };

  double x = x0;
  State y = y0;
  State k1 = f(x, y);
  double h = opt.initial_step > 0 ? opt.initial_step : std::min(span, 1e-3 * std::max(1.0, std::abs(x0)));
  bool last = false;
  long nsteps = 0;
  while (!last) {
    if (++nsteps > opt.max_steps) {
      std::ostringstream os;
      os.precision(17);
      os << "dopri5: step budget exhausted at x = " << x;
      throw SingularApproach(os.str(), x);
    }
    if (h >= std::abs(x1 - x)) {
      h = std::abs(x1 - x);
      last = true;
    }
    const double hs = dir * h;
    const State k2 = f(x + c2 * hs, State(y + hs * a21 * k1));
    const State k3 = f(x + c3 * hs, State(y + hs * (a31 * k1 + a32 * k2)));
    const State k4 = f(x + c4 * hs, State(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = f(x + c5 * hs, State(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = f(x + hs, State(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const State ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = f(x + hs, ynew);
    const State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = err_norm(err, y, ynew);
    const bool finite = ynew.allFinite() && std::isfinite(en);
    if (finite && en <= 1.0) {
      typename DenseTrajectory<N>::Segment seg;
      seg.x0 = x;
      seg.h = hs;
      seg.r1 = y;
      seg.r2 = ynew - y;
      seg.r3 = hs * k1 - seg.r2;
      seg.r4 = seg.r2 - hs * k7 - seg.r3;
      seg.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      out.push(seg);
      x = last ? x1 : x + hs;
      y = ynew;
      k1 = k7;
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= fac;
      if (observer && !observer(x, y)) {
        out.finish(x, y);
        return out;
      }
    } else {
      out.count_rejection();
      last = false;
      h *= finite ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.25;
      if (h < opt.min_step_rel * std::max(1.0, std::abs(x))) {
        std::ostringstream os;
        os.precision(17);
        os << "singular approach: step size underflow at a = " << x;
        throw SingularApproach(os.str(), x);
      }
    }
  }
  out.finish(x1, y);
  return out;
}

}  // namespace selfsim
