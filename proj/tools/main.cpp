#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gencfl/config.hpp"
#include "gencfl/runner.hpp"

namespace {

void add_common_options(CLI::App* cmd, gencfl::CliOptions& opts, std::string& mode,
                        std::int64_t& seed) {
  cmd->add_option("--config", opts.config_path, "Path to the experiment config (JSON)")
      ->required();
  cmd->add_option("--mode", mode, "genetic_cfl, generic_fl, or both (overrides the config)");
  cmd->add_option("--seed", seed, "Seed override");
  cmd->add_option("--out", opts.out_dir, "Output directory (default: current directory)");
}

gencfl::CliOptions finalize(const gencfl::CliOptions& base, const std::string& mode,
                            std::int64_t seed) {
  gencfl::CliOptions opts = base;
  if (!mode.empty()) opts.mode = mode;
  if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genetic clustered federated learning simulator"};
  app.require_subcommand(1);

  gencfl::CliOptions run_opts, sweep_opts;
  std::string run_mode, sweep_mode;
  std::int64_t run_seed = -1, sweep_seed = -1;

  CLI::App* run_cmd =
      app.add_subcommand("run", "Run the experiment and write rounds.csv / clusters.json");
  add_common_options(run_cmd, run_opts, run_mode, run_seed);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Cluster the probe population over a parameter grid");
  add_common_options(sweep_cmd, sweep_opts, sweep_mode, sweep_seed);

  std::string example_path = "config.example";
  CLI::App* example_cmd =
      app.add_subcommand("example-config", "Write a commented config with all defaults");
  example_cmd->add_option("path", example_path, "Destination file (default: config.example)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 1;
  }

  if (run_cmd->parsed()) return gencfl::cli_run(finalize(run_opts, run_mode, run_seed));
  if (sweep_cmd->parsed()) return gencfl::cli_sweep(finalize(sweep_opts, sweep_mode, sweep_seed));
  if (example_cmd->parsed()) {
    std::ofstream out(example_path);
    if (!out) {
      std::cerr << "cannot write " << example_path << "\n";
      return 1;
    }
    out << gencfl::example_config_text();
    std::cout << "wrote " << example_path << "\n";
    return 0;
  }
  return 1;
}
