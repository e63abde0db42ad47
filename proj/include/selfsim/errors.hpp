#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace selfsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the open validity domain of a closed form.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A fixed-point iteration stopped contracting.
class ContractionFailure : public Error {
 public:
  ContractionFailure(const std::string& what, int iterations, double last_increment)
      : Error(what), iterations_(iterations), last_increment_(last_increment) {}
  int iterations() const noexcept { return iterations_; }
  double last_increment() const noexcept { return last_increment_; }

 private:
  int iterations_;
  double last_increment_;
};

/// Newton iteration made no progress.  Carries the parameter trail.
class NewtonStagnation : public Error {
 public:
  NewtonStagnation(const std::string& what, double residual, std::vector<std::vector<double>> trail)
      : Error(what), residual_(residual), trail_(std::move(trail)) {}
  double residual() const noexcept { return residual_; }
  const std::vector<std::vector<double>>& trail() const noexcept { return trail_; }

 private:
  double residual_;
  std::vector<std::vector<double>> trail_;
};

/// Adaptive integrator step size collapsed near a regular singular point.
class SingularApproach : public Error {
 public:
  SingularApproach(const std::string& what, double a) : Error(what), a_(a) {}
  double where() const noexcept { return a_; }

 private:
  double a_;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
  ConfigError(std::string field, const std::string& what) : Error(field + ": " + what), field_(std::move(field)) {}
  /// Offending configuration key, empty when not tied to one.
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Failure of a pipeline sub-stage; the message is prefixed with the stage tag.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace selfsim
