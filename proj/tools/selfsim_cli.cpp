#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "selfsim/errors.hpp"
#include "selfsim/io/commands.hpp"

namespace {

int config_failure(const selfsim::ConfigError& e) {
  std::cerr << nlohmann::json{{"error", "config"}, {"field", e.field()}, {"message", e.what()}}.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar profiles and radial evolution for u_tt - Δu ± u^7 = 0"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  int threads = 1;
  unsigned long long seed = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (default: $SELFSIM_OUT or .)");
  app.add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "placement of synthetic perturbation data");
  for (const auto& name : selfsim::io::command_names()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  selfsim::io::RunOptions opt;
  if (!out_dir.empty())
    opt.out = out_dir;
  else if (const char* env = std::getenv("SELFSIM_OUT"))
    opt.out = env;
  opt.threads = threads;
  opt.seed = seed;

  selfsim::io::RunConfig cfg;
  try {
    cfg = selfsim::io::load_config(config_path);
  } catch (const selfsim::ConfigError& e) {
    return config_failure(e);
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return selfsim::io::run_command_safely(command, cfg, opt);
}
