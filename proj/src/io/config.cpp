#include "selfsim/io/config.hpp"

#include <fstream>

#include "selfsim/errors.hpp"

namespace selfsim::io {

namespace {

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

}  // namespace

double RunConfig::number(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  return number(key);
}

double RunConfig::number(const std::string& key) const {
  if (!has(key)) throw ConfigError(key, "required field is missing");
  const auto& v = raw.at(key);
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

int RunConfig::integer(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const auto& v = raw.at(key);
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<int>();
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = raw.at(key);
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> RunConfig::numbers(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = raw.at(key);
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

RunConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  c.raw = doc;
  if (!doc.contains("schema_version")) throw ConfigError("schema_version", "required field is missing");
  if (!doc.at("schema_version").is_number_integer() || doc.at("schema_version").get<int>() != kSchemaVersion)
    throw ConfigError("schema_version", "expected " + std::to_string(kSchemaVersion));
  c.schema_version = kSchemaVersion;
  if (!doc.contains("sign") || doc.at("sign").is_null()) throw ConfigError("sign", "required field is missing");
  if (!doc.at("sign").is_string()) throw ConfigError("sign", "expected \"focusing\" or \"defocusing\"");
  try {
    c.sign = parse_sign(doc.at("sign").get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError("sign", e.what());
  }
  for (const auto& [k, v] : doc.items()) {
    if (!ends_with(k, "tol")) continue;
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError(k, "tolerances must be positive numbers");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig config_from_report(const nlohmann::json& report) {
  if (!report.contains("inputs")) throw ConfigError("inputs", "report has no config echo");
  return parse_config(report.at("inputs"));
}

}  // namespace selfsim::io
