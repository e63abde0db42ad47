#include "selfsim/io/report.hpp"

#include <cmath>
#include <fstream>

#include "selfsim/errors.hpp"

namespace selfsim::io {

namespace {

// JSON has no inf/nan
nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

RunReport::RunReport(std::string command, const RunConfig& config)
    : command_(std::move(command)), inputs_(config.raw) {}

void RunReport::resolved(const std::string& key, nlohmann::json value) { resolved_[key] = std::move(value); }

void RunReport::fit(const std::string& name, double value, double ci95_half, double window_lo, double window_hi,
                    double residual) {
  fits_.push_back({{"name", name},
                   {"value", num(value)},
                   {"ci95_half", num(ci95_half)},
                   {"window", {num(window_lo), num(window_hi)}},
                   {"residual", num(residual)}});
}

void RunReport::fit(const std::string& name, const LineFit& f, double window_lo, double window_hi) {
  fit(name, f.slope, f.ci95_half, window_lo, window_hi, f.rms_residual);
}

bool RunReport::check(const std::string& name, double value, double threshold, bool upper) {
  const bool pass = upper ? value <= threshold : value >= threshold;
  checks_.push_back({{"name", name},
                     {"value", num(value)},
                     {"threshold", num(threshold)},
                     {"kind", upper ? "max" : "min"},
                     {"pass", pass}});
  return pass;
}

void RunReport::artifact(const std::string& path) { artifacts_.push_back(path); }

bool RunReport::all_passed() const {
  for (const auto& c : checks_)
    if (!c.at("pass").get<bool>()) return false;
  return true;
}

nlohmann::json RunReport::to_json(double wall_clock_s) const {
  return {{"schema_version", kSchemaVersion}, {"command", command_}, {"inputs", inputs_},
          {"resolved", resolved_},            {"fits", fits_},       {"checks", checks_},
          {"artifacts", artifacts_},          {"all_passed", all_passed()}, {"wall_clock_s", wall_clock_s}};
}

void RunReport::write(const std::filesystem::path& path, double wall_clock_s) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("RunReport: cannot open " + path.string());
  out << to_json(wall_clock_s).dump(2) << '\n';
}

}  // namespace selfsim::io
