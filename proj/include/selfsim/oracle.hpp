#pragma once

// Independent adaptive integration of the profile equation, used to cross-check
// every fixed-point construction.

#include "selfsim/dopri.hpp"
#include "selfsim/sign.hpp"

namespace selfsim {

struct OdeState {
  double a = 0.0;
  double q = 0.0;
  double dq = 0.0;
};

struct OracleOptions {
  double rtol = 1e-13;
  double atol = 1e-16;
  double singular_standoff = 1e-3;
};

class OracleSolution {
 public:
  OracleSolution(DenseTrajectory<2> traj, Sign sign) : traj_(std::move(traj)), sign_(sign) {}

  OdeState final_state() const;
  OdeState operator()(double a) const;
  /// Q'' recovered from the equation itself.
  double second_derivative(double a) const;
  long steps() const { return traj_.steps(); }

 private:
  DenseTrajectory<2> traj_;
  Sign sign_;
};

/// Right-hand side of the profile equation as a first-order system in (Q, Q').
Eigen::Vector2d profile_rhs(double a, const Eigen::Vector2d& y, Sign sign);

/// Integrates from start.a to a_end.  The closed path must stay at least the standoff
/// away from a = 0 and a = 1; violations and step collapse raise SingularApproach.
OracleSolution oracle_integrate(const OdeState& start, double a_end, Sign sign, const OracleOptions& opt = {});

/// Even power series about a = 0 with Q(0) = q0, summed to the requested truncation.
/// Accurate for |a| small; used to start the oracle off the singular point.
OdeState interior_series(double q0, Sign sign, double a, int terms = 40);

}  // namespace selfsim
