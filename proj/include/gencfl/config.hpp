#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gencfl/clustering.hpp"
#include "gencfl/data.hpp"
#include "gencfl/hp_space.hpp"

namespace gencfl {

inline constexpr const char* kVersion = "0.1.0";

// Everything a run needs, loadable from a commented JSON file. Unknown keys
// are rejected so typos surface instead of silently using defaults.
struct ExperimentConfig {
  std::string mode = "both";  // genetic_cfl | generic_fl | both
  std::uint64_t seed = 1;
  int rounds = 10;
  int epochs_per_round = 1;

  int n_clients_total = 100;
  double client_ratio = 0.1;

  int probe_candidates = 3;  // learning rates trialed per client in the probe round
  int elite_count = 2;
  bool evolution_enabled = true;

  DbscanParams dbscan{0.2, 2};
  bool cluster_lr_only = false;

  HpBounds bounds{};

  PartitionOptions shards{300, 600, 0.5, false};

  struct Pretrain {
    double fraction = 0.05;  // share of the training set used to warm-start the server
    double lr = 1e-3;
    int batch_size = 32;
    int epochs = 1;
  } pretrain;

  std::vector<int> hidden_layers{64};

  struct DataPaths {
    std::string train_images = "data/train-images-idx3-ubyte";
    std::string train_labels = "data/train-labels-idx1-ubyte";
    std::string test_images = "data/test-images-idx3-ubyte";
    std::string test_labels = "data/test-labels-idx1-ubyte";
  } data;

  // Optional static configuration for the generic baseline; both fields must
  // be set together. Unset means each client keeps one randomly sampled
  // genome.
  struct Baseline {
    std::optional<double> fixed_lr;
    std::optional<int> fixed_batch;
  } baseline;

  struct Sweep {
    std::vector<double> epsilons{0.2, 0.175, 0.15, 0.1};
    std::vector<int> min_pts{1, 2};
  } sweep;

  int active_clients() const;
  void validate() const;  // throws ConfigError

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  // Parses a JSON file; // and /* */ comments are allowed.
  static ExperimentConfig load(const std::string& path);
};

// Commented config with every default spelled out; parseable by load().
std::string example_config_text();

}  // namespace gencfl
