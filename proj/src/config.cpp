#include "gencfl/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "gencfl/errors.hpp"

namespace gencfl {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& scope) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.contains(key)) {
      throw ConfigError("unknown config key \"" + (scope.empty() ? key : scope + "." + key) +
                        "\"");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad value for config key \"") + key + "\": " + e.what());
    }
  }
}

}  // namespace

int ExperimentConfig::active_clients() const {
  return static_cast<int>(std::lround(n_clients_total * client_ratio));
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (mode != "genetic_cfl" && mode != "generic_fl" && mode != "both") {
    fail("mode must be genetic_cfl, generic_fl, or both");
  }
  if (rounds < 0) fail("rounds must be >= 0");
  if (epochs_per_round < 1) fail("epochs_per_round must be >= 1");
  if (n_clients_total < 1) fail("clients.total must be >= 1");
  if (!(client_ratio > 0.0) || client_ratio > 1.0) fail("clients.ratio must be in (0, 1]");
  if (active_clients() < 1) fail("clients.total * clients.ratio rounds to zero clients");
  if (probe_candidates < 1) fail("probe.candidates must be >= 1");
  if (elite_count < 1) fail("genetic.elite_count must be >= 1");
  try {
    dbscan.validate();
    bounds.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (shards.min_size < 1 || shards.min_size > shards.max_size) {
    fail("shards: need 1 <= min_size <= max_size");
  }
  if (shards.skew < 0.0 || shards.skew > 1.0) fail("shards.skew must be in [0, 1]");
  if (pretrain.fraction < 0.0 || pretrain.fraction >= 1.0) {
    fail("pretrain.fraction must be in [0, 1)");
  }
  if (pretrain.fraction > 0.0 && (!(pretrain.lr > 0.0) || pretrain.batch_size < 1 ||
                                  pretrain.epochs < 1)) {
    fail("pretrain: lr, batch_size and epochs must be positive");
  }
  if (hidden_layers.empty()) fail("model.hidden_layers must not be empty");
  for (int h : hidden_layers) {
    if (h < 1) fail("model.hidden_layers entries must be >= 1");
  }
  if (baseline.fixed_lr.has_value() != baseline.fixed_batch.has_value()) {
    fail("baseline: fixed_lr and fixed_batch must be set together");
  }
  if (baseline.fixed_lr && !(*baseline.fixed_lr > 0.0)) fail("baseline.fixed_lr must be > 0");
  if (baseline.fixed_batch && *baseline.fixed_batch < 1) fail("baseline.fixed_batch must be >= 1");
  if (sweep.epsilons.empty() || sweep.min_pts.empty()) {
    fail("sweep: epsilons and min_pts must not be empty");
  }
  for (double e : sweep.epsilons) {
    if (!(e > 0.0)) fail("sweep.epsilons entries must be > 0");
  }
  for (int m : sweep.min_pts) {
    if (m < 1) fail("sweep.min_pts entries must be >= 1");
  }
}

json ExperimentConfig::to_json() const {
  json j;
  j["mode"] = mode;
  j["seed"] = seed;
  j["rounds"] = rounds;
  j["epochs_per_round"] = epochs_per_round;
  j["clients"] = {{"total", n_clients_total}, {"ratio", client_ratio}};
  j["probe"] = {{"candidates", probe_candidates}};
  j["genetic"] = {{"elite_count", elite_count}, {"evolution_enabled", evolution_enabled}};
  j["dbscan"] = {{"epsilon", dbscan.epsilon},
                 {"min_pts", dbscan.min_pts},
                 {"lr_only", cluster_lr_only}};
  j["hp_bounds"] = {{"lr_min", bounds.lr_min},
                    {"lr_max", bounds.lr_max},
                    {"batch_min", bounds.bs_min},
                    {"batch_max", bounds.bs_max}};
  j["shards"] = {{"min_size", shards.min_size},
                 {"max_size", shards.max_size},
                 {"skew", shards.skew},
                 {"disjoint", shards.disjoint}};
  j["pretrain"] = {{"fraction", pretrain.fraction},
                   {"lr", pretrain.lr},
                   {"batch_size", pretrain.batch_size},
                   {"epochs", pretrain.epochs}};
  j["model"] = {{"hidden_layers", hidden_layers}};
  j["data"] = {{"train_images", data.train_images},
               {"train_labels", data.train_labels},
               {"test_images", data.test_images},
               {"test_labels", data.test_labels}};
  j["baseline"] = {{"fixed_lr", baseline.fixed_lr ? json(*baseline.fixed_lr) : json(nullptr)},
                   {"fixed_batch",
                    baseline.fixed_batch ? json(*baseline.fixed_batch) : json(nullptr)}};
  j["sweep"] = {{"epsilons", sweep.epsilons}, {"min_pts", sweep.min_pts}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(j, {"mode", "seed", "rounds", "epochs_per_round", "clients", "probe",
                          "genetic", "dbscan", "hp_bounds", "shards", "pretrain", "model",
                          "data", "baseline", "sweep"},
                      "");
  ExperimentConfig cfg;
  read(j, "mode", cfg.mode);
  read(j, "seed", cfg.seed);
  read(j, "rounds", cfg.rounds);
  read(j, "epochs_per_round", cfg.epochs_per_round);

  if (j.contains("clients")) {
    const auto& c = j.at("clients");
    reject_unknown_keys(c, {"total", "ratio"}, "clients");
    read(c, "total", cfg.n_clients_total);
    read(c, "ratio", cfg.client_ratio);
  }
  if (j.contains("probe")) {
    const auto& p = j.at("probe");
    reject_unknown_keys(p, {"candidates"}, "probe");
    read(p, "candidates", cfg.probe_candidates);
  }
  if (j.contains("genetic")) {
    const auto& g = j.at("genetic");
    reject_unknown_keys(g, {"elite_count", "evolution_enabled"}, "genetic");
    read(g, "elite_count", cfg.elite_count);
    read(g, "evolution_enabled", cfg.evolution_enabled);
  }
  if (j.contains("dbscan")) {
    const auto& d = j.at("dbscan");
    reject_unknown_keys(d, {"epsilon", "min_pts", "lr_only"}, "dbscan");
    read(d, "epsilon", cfg.dbscan.epsilon);
    read(d, "min_pts", cfg.dbscan.min_pts);
    read(d, "lr_only", cfg.cluster_lr_only);
  }
  if (j.contains("hp_bounds")) {
    const auto& b = j.at("hp_bounds");
    reject_unknown_keys(b, {"lr_min", "lr_max", "batch_min", "batch_max"}, "hp_bounds");
    read(b, "lr_min", cfg.bounds.lr_min);
    read(b, "lr_max", cfg.bounds.lr_max);
    read(b, "batch_min", cfg.bounds.bs_min);
    read(b, "batch_max", cfg.bounds.bs_max);
  }
  if (j.contains("shards")) {
    const auto& s = j.at("shards");
    reject_unknown_keys(s, {"min_size", "max_size", "skew", "disjoint"}, "shards");
    read(s, "min_size", cfg.shards.min_size);
    read(s, "max_size", cfg.shards.max_size);
    read(s, "skew", cfg.shards.skew);
    read(s, "disjoint", cfg.shards.disjoint);
  }
  if (j.contains("pretrain")) {
    const auto& p = j.at("pretrain");
    reject_unknown_keys(p, {"fraction", "lr", "batch_size", "epochs"}, "pretrain");
    read(p, "fraction", cfg.pretrain.fraction);
    read(p, "lr", cfg.pretrain.lr);
    read(p, "batch_size", cfg.pretrain.batch_size);
    read(p, "epochs", cfg.pretrain.epochs);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown_keys(m, {"hidden_layers"}, "model");
    read(m, "hidden_layers", cfg.hidden_layers);
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    reject_unknown_keys(d, {"train_images", "train_labels", "test_images", "test_labels"},
                        "data");
    read(d, "train_images", cfg.data.train_images);
    read(d, "train_labels", cfg.data.train_labels);
    read(d, "test_images", cfg.data.test_images);
    read(d, "test_labels", cfg.data.test_labels);
  }
  if (j.contains("baseline")) {
    const auto& b = j.at("baseline");
    reject_unknown_keys(b, {"fixed_lr", "fixed_batch"}, "baseline");
    if (b.contains("fixed_lr") && !b.at("fixed_lr").is_null()) {
      cfg.baseline.fixed_lr = b.at("fixed_lr").get<double>();
    }
    if (b.contains("fixed_batch") && !b.at("fixed_batch").is_null()) {
      cfg.baseline.fixed_batch = b.at("fixed_batch").get<int>();
    }
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    reject_unknown_keys(s, {"epsilons", "min_pts"}, "sweep");
    read(s, "epsilons", cfg.sweep.epsilons);
    read(s, "min_pts", cfg.sweep.min_pts);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

std::string example_config_text() {
  return R"(// gencfl experiment configuration. All values below are the defaults;
// delete anything you do not want to override. // and /* */ comments are fine.
{
  // genetic_cfl, generic_fl, or both (runs each mode with the same seed).
  "mode": "both",
  "seed": 1,
  // Federated rounds after the initial probe round.
  "rounds": 10,
  // Local epochs per client per round.
  "epochs_per_round": 1,

  // Client pool and the participating fraction: round(total * ratio) clients
  // are chosen once per seed and reused every round.
  "clients": { "total": 100, "ratio": 0.1 },

  // Learning rates trialed per client in the probe round (genetic mode).
  // The generic baseline always probes a single sampled genome.
  "probe": { "candidates": 3 },

  // Lowest-loss genomes copied unchanged each generation; evolution_enabled
  // exists for ablations.
  "genetic": { "elite_count": 2, "evolution_enabled": true },

  // Density clustering over client genomes; lr_only drops the batch-size
  // coordinate from the metric.
  "dbscan": { "epsilon": 0.2, "min_pts": 2, "lr_only": false },

  // Genome domain: learning rate (log-uniform) and batch size (powers of two).
  "hp_bounds": { "lr_min": 1e-7, "lr_max": 0.1, "batch_min": 16, "batch_max": 128 },

  // Per-client shard sizes and label skew (0 = match global label mix,
  // 1 = at most two classes per client). disjoint forbids index reuse
  // across clients.
  "shards": { "min_size": 300, "max_size": 600, "skew": 0.5, "disjoint": false },

  // Server warm-start on a random subset of the training data before the
  // probe round.
  "pretrain": { "fraction": 0.05, "lr": 0.001, "batch_size": 32, "epochs": 1 },

  // Hidden layer widths of the shared MLP (input/output sizes come from the
  // dataset).
  "model": { "hidden_layers": [64] },

  // IDX file locations (run tools/prepare_data.py to unpack the bundled set).
  "data": {
    "train_images": "data/train-images-idx3-ubyte",
    "train_labels": "data/train-labels-idx1-ubyte",
    "test_images": "data/test-images-idx3-ubyte",
    "test_labels": "data/test-labels-idx1-ubyte"
  },

  // Set both to pin every baseline client to one fixed genome instead of
  // random static ones.
  "baseline": { "fixed_lr": null, "fixed_batch": null },

  // Grid for the `sweep` subcommand.
  "sweep": { "epsilons": [0.2, 0.175, 0.15, 0.1], "min_pts": [1, 2] }
}
)";
}

}  // namespace gencfl
