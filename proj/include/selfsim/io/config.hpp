#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfsim/sign.hpp"

namespace selfsim::io {

inline constexpr int kSchemaVersion = 1;

/// One JSON document per run.  Required: schema_version, sign.  Every key whose name ends in
/// "tol" must be positive.  The original document is kept for the report echo.
struct RunConfig {
  int schema_version = kSchemaVersion;
  Sign sign = Sign::defocusing;
  nlohmann::json raw;

  bool has(const std::string& key) const { return raw.contains(key) && !raw.at(key).is_null(); }
  double number(const std::string& key, double fallback) const;
  double number(const std::string& key) const;  // throws ConfigError naming the key
  int integer(const std::string& key, int fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// The config echoed under "inputs" of a report.
RunConfig config_from_report(const nlohmann::json& report);

}  // namespace selfsim::io
