#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "selfsim/fit.hpp"
#include "selfsim/io/config.hpp"

namespace selfsim::io {

/// Report document: inputs echo, resolved constants, fits (each with window and residual),
/// checks (pass/fail with value and threshold), wall-clock seconds.
class RunReport {
 public:
  RunReport(std::string command, const RunConfig& config);

  void resolved(const std::string& key, nlohmann::json value);
  void fit(const std::string& name, double value, double ci95_half, double window_lo, double window_hi,
           double residual);
  void fit(const std::string& name, const LineFit& f, double window_lo, double window_hi);
  /// pass = value <= threshold when upper is true, value >= threshold otherwise.
  bool check(const std::string& name, double value, double threshold, bool upper = true);
  void artifact(const std::string& path);

  bool all_passed() const;
  nlohmann::json to_json(double wall_clock_s) const;
  void write(const std::filesystem::path& path, double wall_clock_s) const;

 private:
  std::string command_;
  nlohmann::json inputs_;
  nlohmann::json resolved_ = nlohmann::json::object();
  nlohmann::json fits_ = nlohmann::json::array();
  nlohmann::json checks_ = nlohmann::json::array();
  nlohmann::json artifacts_ = nlohmann::json::array();
};

}  // namespace selfsim::io
