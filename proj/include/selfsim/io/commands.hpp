#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "selfsim/io/config.hpp"

namespace selfsim::io {

struct RunOptions {
  std::filesystem::path out = ".";
  int threads = 1;
  unsigned long long seed = 0;  // placement of synthetic perturbation data only
};

const std::vector<std::string>& command_names();

/// Runs one pipeline, writing <out>/<command>.json and its CSV files.
/// Returns 0 on success; throws ConfigError for invalid input and selfsim::Error for solver failures.
int run_command(const std::string& command, const RunConfig& config, const RunOptions& options);

/// run_command with the exit-code mapping 0 / 1 (solver failure) / 2 (config error); the diagnostic
/// is a one-line JSON object on stderr.
int run_command_safely(const std::string& command, const RunConfig& config, const RunOptions& options);

}  // namespace selfsim::io
