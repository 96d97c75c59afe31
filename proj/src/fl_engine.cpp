#include "gencfl/fl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gencfl/errors.hpp"
#include "gencfl/parallel.hpp"

namespace gencfl {

namespace {

// Seed stream tags. Every client/round/candidate derives its own seed, so
// results are independent of scheduling.
constexpr std::uint64_t kProbeHpStream = 11;
constexpr std::uint64_t kProbeTrainStream = 12;
constexpr std::uint64_t kRoundTrainStream = 13;
constexpr std::uint64_t kEvolveStream = 14;

}  // namespace

ModelWeights aggregate(const std::vector<ModelWeights>& models) {
  if (models.empty()) throw std::invalid_argument("aggregate: no models");
  ModelWeights out = models.front();
  for (std::size_t m = 1; m < models.size(); ++m) {
    if (!out.same_shape(models[m])) {
      throw std::invalid_argument("aggregate: model shape mismatch");
    }
    for (std::size_t l = 0; l < out.weights.size(); ++l) {
      out.weights[l] += models[m].weights[l];
      out.biases[l] += models[m].biases[l];
    }
  }
  const double inv = 1.0 / static_cast<double>(models.size());
  for (std::size_t l = 0; l < out.weights.size(); ++l) {
    out.weights[l] *= inv;
    out.biases[l] *= inv;
  }
  return out;
}

ModelWeights broadcast_round(const ModelWeights& server, std::vector<ClientState>& clients,
                             const Dataset& train_data, const BroadcastOptions& opts) {
  if (clients.empty()) throw std::invalid_argument("broadcast_round: no clients");
  if (opts.k_candidates < 1) throw std::invalid_argument("broadcast_round: k_candidates < 1");
  opts.bounds.validate();

  const int n = static_cast<int>(clients.size());
  std::vector<ModelWeights> kept(static_cast<std::size_t>(n));

  parallel_for(n, opts.threads, [&](int i) {
    ClientState& client = clients[static_cast<std::size_t>(i)];
    Rng hp_rng(mix_seed(opts.seed, kProbeHpStream, static_cast<std::uint64_t>(i)));

    int batch = 0;
    std::vector<double> candidate_lrs;
    if (opts.fixed_hp.has_value()) {
      batch = opts.fixed_hp->batch_size;
      candidate_lrs.assign(1, opts.fixed_hp->lr);
    } else {
      batch = sample(opts.bounds, hp_rng).batch_size;
      candidate_lrs.resize(static_cast<std::size_t>(opts.k_candidates));
      for (auto& lr : candidate_lrs) {
        lr = hp_rng.log_uniform(opts.bounds.lr_min, opts.bounds.lr_max);
      }
    }

    const DatasetView shard(train_data, client.shard);
    int best = -1;
    double best_loss = 0.0;
    ModelWeights best_weights;
    for (std::size_t j = 0; j < candidate_lrs.size(); ++j) {
      const HyperParams hp{candidate_lrs[j], batch};
      auto [w, report] = train(server, shard, hp, /*epochs=*/1,
                               mix_seed(opts.seed, kProbeTrainStream,
                                        static_cast<std::uint64_t>(i), j));
      if (best < 0 || report.final_loss < best_loss) {
        best = static_cast<int>(j);
        best_loss = report.final_loss;
        best_weights = std::move(w);
      }
    }
    client.hp = HyperParams{candidate_lrs[static_cast<std::size_t>(best)], batch};
    client.last_loss = best_loss;
    kept[static_cast<std::size_t>(i)] = std::move(best_weights);
  });

  return aggregate(kept);
}

namespace {

// Genome slots are handed out by position within the cluster: member lists are
// in ascending client order and stay that way for the whole run.
void evolve_cluster_genomes(FlState& state, int round, const RoundOptions& opts) {
  const auto members = state.clusters.members();
  for (int c = 0; c < state.clusters.n_clusters; ++c) {
    const auto& ids = members[static_cast<std::size_t>(c)];
    std::unique_ptr<GeneticRng> rng =
        opts.genetic_rng
            ? opts.genetic_rng(round, c)
            : std::make_unique<SeededGeneticRng>(mix_seed(
                  opts.seed, kEvolveStream, static_cast<std::uint64_t>(round),
                  static_cast<std::uint64_t>(c)));

    if (ids.size() == 1) {
      // Noise singleton: no mates to cross with, so it walks by mutation.
      ClientState& client = state.clients[static_cast<std::size_t>(ids.front())];
      client.hp = mutate(client.hp, opts.bounds, *rng);
      continue;
    }

    Population pop;
    pop.members.reserve(ids.size());
    pop.losses.reserve(ids.size());
    for (int id : ids) {
      const ClientState& client = state.clients[static_cast<std::size_t>(id)];
      pop.members.push_back(client.hp);
      pop.losses.push_back(client.last_loss.value_or(kLossCap));
    }
    const Population next = evolve(pop, opts.elite_count, opts.bounds, *rng);
    for (std::size_t slot = 0; slot < ids.size(); ++slot) {
      state.clients[static_cast<std::size_t>(ids[slot])].hp = next.members[slot];
    }
  }
}

std::vector<ClusterPopulation> snapshot_populations(const FlState& state) {
  std::vector<ClusterPopulation> out;
  if (!state.clustered) return out;
  const auto members = state.clusters.members();
  out.reserve(members.size());
  for (int c = 0; c < state.clusters.n_clusters; ++c) {
    ClusterPopulation cp;
    cp.cluster_id = c;
    for (int id : members[static_cast<std::size_t>(c)]) {
      const ClientState& client = state.clients[static_cast<std::size_t>(id)];
      cp.client_ids.push_back(id);
      cp.members.push_back(client.hp);
      cp.losses.push_back(client.last_loss.value_or(kLossCap));
    }
    out.push_back(std::move(cp));
  }
  return out;
}

}  // namespace

std::vector<RoundMetrics> run_rounds(FlState& state, const Dataset& train_data,
                                     const DatasetView& eval_data, const RoundOptions& opts) {
  if (state.clients.empty()) throw std::invalid_argument("run_rounds: no clients");
  if (opts.rounds < 0) throw std::invalid_argument("run_rounds: negative round count");
  if (opts.epochs_per_round < 1) throw std::invalid_argument("run_rounds: epochs_per_round < 1");
  if (opts.mode == Mode::GeneticCfl && !state.clustered) {
    throw std::invalid_argument("run_rounds: genetic mode requires cluster assignments");
  }
  opts.bounds.validate();

  const int n = static_cast<int>(state.clients.size());
  std::vector<RoundMetrics> metrics;
  metrics.reserve(static_cast<std::size_t>(opts.rounds));

  std::vector<ModelWeights> trained(static_cast<std::size_t>(n));
  for (int r = 1; r <= opts.rounds; ++r) {
    if (opts.mode == Mode::GeneticCfl && opts.evolve_enabled) {
      evolve_cluster_genomes(state, r, opts);
    }

    parallel_for(n, opts.threads, [&](int i) {
      ClientState& client = state.clients[static_cast<std::size_t>(i)];
      const DatasetView shard(train_data, client.shard);
      auto [w, report] =
          train(state.server, shard, client.hp, opts.epochs_per_round,
                mix_seed(opts.seed, kRoundTrainStream, static_cast<std::uint64_t>(r),
                         static_cast<std::uint64_t>(i)));
      client.last_loss = report.final_loss;
      trained[static_cast<std::size_t>(i)] = std::move(w);
    });

    state.server = aggregate(trained);
    const EvalResult eval = evaluate(state.server, eval_data);
    if (!std::isfinite(eval.loss)) {
      throw EngineError("run_rounds: non-finite evaluation loss at round " + std::to_string(r));
    }

    RoundMetrics rm;
    rm.round = r;
    rm.server_accuracy = eval.accuracy;
    rm.server_loss = eval.loss;
    rm.per_cluster = snapshot_populations(state);
    metrics.push_back(std::move(rm));
  }
  return metrics;
}

}  // namespace gencfl
