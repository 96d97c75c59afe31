#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gencfl/config.hpp"
#include "gencfl/fl_engine.hpp"

namespace gencfl {

std::string to_string(Mode mode);
// "genetic_cfl" | "generic_fl" | "both" -> concrete modes, stable order.
std::vector<Mode> parse_mode_selection(const std::string& selection);

struct ModeRun {
  Mode mode = Mode::GeneticCfl;
  std::vector<RoundMetrics> rounds;
};

// Loads the IDX files named by the config; harmonizes the class count across
// the train/test pair.
std::pair<Dataset, Dataset> load_datasets(const ExperimentConfig& cfg);

// Full pipeline for each selected mode: shard planning, client selection,
// server init + pretrain, probe round, clustering (genetic mode), training
// rounds. Every mode sees identical seeds.
std::vector<ModeRun> run_experiment(const ExperimentConfig& cfg, const std::string& mode_selection,
                                    int threads);

// Probe-round client genomes (the population the DBSCAN sweep analyzes).
std::vector<HyperParams> probe_population(const ExperimentConfig& cfg, int threads);

// Output formats.
std::string rounds_csv(const std::vector<ModeRun>& runs);
nlohmann::json clusters_json(const std::vector<ModeRun>& runs);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct CliOptions {
  std::string config_path;
  std::optional<std::string> mode;  // overrides config
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

// Exit codes: 0 success, 1 config error, 2 dataset error, 3 runtime failure.
int cli_run(const CliOptions& opts);
int cli_sweep(const CliOptions& opts);

}  // namespace gencfl
