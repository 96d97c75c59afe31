#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gencfl/clustering.hpp"
#include "gencfl/data.hpp"
#include "gencfl/genetic.hpp"
#include "gencfl/hp_space.hpp"
#include "gencfl/nn.hpp"

namespace gencfl {

enum class Mode { GeneticCfl, GenericFl };

struct ClientState {
  std::vector<int> shard;  // indices into the training dataset
  HyperParams hp;
  std::optional<double> last_loss;  // mean final-epoch training loss
  std::optional<int> cluster_id;
};

struct ClusterPopulation {
  int cluster_id = 0;
  std::vector<int> client_ids;
  std::vector<HyperParams> members;
  std::vector<double> losses;
};

struct RoundMetrics {
  int round = 0;
  double server_accuracy = 0.0;
  double server_loss = 0.0;
  std::vector<ClusterPopulation> per_cluster;
};

// Uniform elementwise mean of the client models.
ModelWeights aggregate(const std::vector<ModelWeights>& models);

struct BroadcastOptions {
  int k_candidates = 3;
  HpBounds bounds;
  // When set, every client probes exactly this configuration instead of
  // sampling (the tuned-but-static baseline variant).
  std::optional<HyperParams> fixed_hp;
  std::uint64_t seed = 1;
  int threads = 1;
};

// The probe round: every client clones the server model once per candidate
// learning rate (batch size drawn once per client), trains each clone for one
// epoch, and keeps the weights, learning rate, and loss of the best candidate.
// Returns the aggregate of the kept models; clients are updated in place.
ModelWeights broadcast_round(const ModelWeights& server, std::vector<ClientState>& clients,
                             const Dataset& train_data, const BroadcastOptions& opts);

using GeneticRngFactory =
    std::function<std::unique_ptr<GeneticRng>(int round, int cluster_id)>;

struct RoundOptions {
  Mode mode = Mode::GeneticCfl;
  bool evolve_enabled = true;  // ablation switch; ignored in generic mode
  int rounds = 10;
  int epochs_per_round = 1;
  int elite_count = 2;
  HpBounds bounds;
  std::uint64_t seed = 1;
  int threads = 1;
  // Test hook; defaults to seeded rngs derived from `seed`.
  GeneticRngFactory genetic_rng;
};

struct FlState {
  ModelWeights server;
  std::vector<ClientState> clients;
  ClusterAssignment clusters;
  bool clustered = false;
};

// The main training loop. Per round: evolve each cluster's genomes (genetic
// mode), train every client from the current server weights, aggregate
// uniformly, evaluate on held-out data. Metrics are recorded per round.
std::vector<RoundMetrics> run_rounds(FlState& state, const Dataset& train_data,
                                     const DatasetView& eval_data, const RoundOptions& opts);

}  // namespace gencfl
