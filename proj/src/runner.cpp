#include "gencfl/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "gencfl/errors.hpp"
#include "gencfl/parallel.hpp"

namespace gencfl {

namespace {

using nlohmann::json;

constexpr std::uint64_t kShardStream = 21;
constexpr std::uint64_t kActiveStream = 22;
constexpr std::uint64_t kServerInitStream = 23;
constexpr std::uint64_t kPretrainStream = 24;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct PreparedRun {
  Dataset train;
  Dataset test;
  std::vector<int> eval_indices;
  ModelArch arch;
  ModelWeights server;                  // post-pretrain weights
  std::vector<ClientState> clients;     // active clients with shards, no hp yet
};

PreparedRun prepare(const ExperimentConfig& cfg, int threads) {
  (void)threads;
  PreparedRun prep;
  auto [train_ds, test_ds] = load_datasets(cfg);
  prep.train = std::move(train_ds);
  prep.test = std::move(test_ds);
  prep.eval_indices = all_indices(prep.test);

  const auto plan =
      partition_non_iid(prep.train, cfg.n_clients_total, cfg.shards, mix_seed(cfg.seed, kShardStream));

  const int n_active = cfg.active_clients();
  Rng pick(mix_seed(cfg.seed, kActiveStream));
  const auto active = pick.sample_without_replacement(cfg.n_clients_total, n_active);
  prep.clients.resize(static_cast<std::size_t>(n_active));
  for (int i = 0; i < n_active; ++i) {
    prep.clients[static_cast<std::size_t>(i)].shard =
        plan.shards[static_cast<std::size_t>(active[static_cast<std::size_t>(i)])];
  }

  prep.arch.layer_sizes.push_back(static_cast<int>(prep.train.dim()));
  for (int h : cfg.hidden_layers) prep.arch.layer_sizes.push_back(h);
  prep.arch.layer_sizes.push_back(prep.train.classes);

  prep.server = init_weights(prep.arch, mix_seed(cfg.seed, kServerInitStream));
  if (cfg.pretrain.fraction > 0.0) {
    const int n_pre = static_cast<int>(
        std::lround(cfg.pretrain.fraction * static_cast<double>(prep.train.n())));
    if (n_pre > 0) {
      Rng rng(mix_seed(cfg.seed, kPretrainStream));
      const auto idx = rng.sample_without_replacement(static_cast<int>(prep.train.n()), n_pre);
      const HyperParams hp{cfg.pretrain.lr, cfg.pretrain.batch_size};
      auto [w, report] = train(prep.server, DatasetView(prep.train, idx), hp,
                               cfg.pretrain.epochs, mix_seed(cfg.seed, kPretrainStream, 1));
      (void)report;
      prep.server = std::move(w);
    }
  }
  return prep;
}

std::vector<RoundMetrics> run_mode(const PreparedRun& prep, const ExperimentConfig& cfg,
                                   Mode mode, int threads) {
  FlState state;
  state.server = prep.server;
  state.clients = prep.clients;

  BroadcastOptions probe;
  probe.bounds = cfg.bounds;
  probe.seed = cfg.seed;
  probe.threads = threads;
  if (mode == Mode::GeneticCfl) {
    probe.k_candidates = cfg.probe_candidates;
  } else {
    // The baseline keeps whatever single genome it samples: a plain local
    // training + FedAvg round.
    probe.k_candidates = 1;
    if (cfg.baseline.fixed_lr) {
      probe.fixed_hp = HyperParams{*cfg.baseline.fixed_lr, *cfg.baseline.fixed_batch};
    }
  }
  state.server = broadcast_round(state.server, state.clients, prep.train, probe);

  if (mode == Mode::GeneticCfl) {
    std::vector<HyperParams> points;
    points.reserve(state.clients.size());
    for (const auto& c : state.clients) points.push_back(c.hp);
    const HpMetric metric = cfg.cluster_lr_only ? HpMetric(distance_lr_only) : HpMetric(distance);
    state.clusters = dbscan(points, cfg.dbscan, metric);
    state.clustered = true;
    for (std::size_t i = 0; i < state.clients.size(); ++i) {
      state.clients[i].cluster_id = state.clusters.labels[i];
    }
  }

  RoundOptions ro;
  ro.mode = mode;
  ro.evolve_enabled = cfg.evolution_enabled;
  ro.rounds = cfg.rounds;
  ro.epochs_per_round = cfg.epochs_per_round;
  ro.elite_count = cfg.elite_count;
  ro.bounds = cfg.bounds;
  ro.seed = cfg.seed;
  ro.threads = threads;

  const DatasetView eval_view(prep.test, prep.eval_indices);
  return run_rounds(state, prep.train, eval_view, ro);
}

json manifest_json(const ExperimentConfig& cfg, const std::string& mode_selection,
                   const std::string& started, const std::vector<std::string>& outputs) {
  json m;
  m["artifact"] = "gencfl";
  m["version"] = kVersion;
  m["started_utc"] = started;
  m["finished_utc"] = utc_now();
  m["mode_selection"] = mode_selection;
  m["resolved_seed"] = cfg.seed;
  m["threads_env"] = threads_from_env();
  m["config"] = cfg.to_json();
  m["outputs"] = outputs;
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EngineError("cannot write " + path.string());
  out << contents;
}

ExperimentConfig load_cli_config(const CliOptions& opts) {
  ExperimentConfig cfg = ExperimentConfig::load(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.mode) {
    cfg.mode = *opts.mode;
    cfg.validate();
  }
  return cfg;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

std::string to_string(Mode mode) {
  return mode == Mode::GeneticCfl ? "genetic_cfl" : "generic_fl";
}

std::vector<Mode> parse_mode_selection(const std::string& selection) {
  if (selection == "genetic_cfl") return {Mode::GeneticCfl};
  if (selection == "generic_fl") return {Mode::GenericFl};
  if (selection == "both") return {Mode::GeneticCfl, Mode::GenericFl};
  throw ConfigError("mode must be genetic_cfl, generic_fl, or both");
}

std::pair<Dataset, Dataset> load_datasets(const ExperimentConfig& cfg) {
  Dataset train = load_idx(cfg.data.train_images, cfg.data.train_labels);
  Dataset test = load_idx(cfg.data.test_images, cfg.data.test_labels);
  if (train.n() == 0 || test.n() == 0) {
    throw DataError(DataError::Kind::Truncated, "empty dataset");
  }
  const int classes = std::max(train.classes, test.classes);
  train.classes = classes;
  test.classes = classes;
  return {std::move(train), std::move(test)};
}

std::vector<ModeRun> run_experiment(const ExperimentConfig& cfg, const std::string& mode_selection,
                                    int threads) {
  cfg.validate();
  const auto modes = parse_mode_selection(mode_selection);
  const PreparedRun prep = prepare(cfg, threads);

  std::vector<ModeRun> out;
  out.reserve(modes.size());
  for (Mode mode : modes) {
    ModeRun run;
    run.mode = mode;
    run.rounds = run_mode(prep, cfg, mode, threads);
    out.push_back(std::move(run));
  }
  return out;
}

std::vector<HyperParams> probe_population(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const PreparedRun prep = prepare(cfg, threads);
  FlState state;
  state.server = prep.server;
  state.clients = prep.clients;
  BroadcastOptions probe;
  probe.k_candidates = cfg.probe_candidates;
  probe.bounds = cfg.bounds;
  probe.seed = cfg.seed;
  probe.threads = threads;
  broadcast_round(state.server, state.clients, prep.train, probe);
  std::vector<HyperParams> points;
  points.reserve(state.clients.size());
  for (const auto& c : state.clients) points.push_back(c.hp);
  return points;
}

std::string rounds_csv(const std::vector<ModeRun>& runs) {
  std::string out = "mode,round,accuracy,loss\r\n";
  for (const auto& run : runs) {
    for (const auto& rm : run.rounds) {
      out += to_string(run.mode);
      out += ',' + std::to_string(rm.round);
      out += ',' + format_double(rm.server_accuracy);
      out += ',' + format_double(rm.server_loss);
      out += "\r\n";
    }
  }
  return out;
}

json clusters_json(const std::vector<ModeRun>& runs) {
  json root;
  root["rounds"] = json::array();
  for (const auto& run : runs) {
    for (const auto& rm : run.rounds) {
      json entry;
      entry["mode"] = to_string(run.mode);
      entry["round"] = rm.round;
      entry["clusters"] = json::array();
      for (const auto& cp : rm.per_cluster) {
        json c;
        c["cluster_id"] = cp.cluster_id;
        c["client_ids"] = cp.client_ids;
        c["members"] = json::array();
        for (const auto& hp : cp.members) {
          c["members"].push_back({{"lr", hp.lr}, {"batch_size", hp.batch_size}});
        }
        c["losses"] = cp.losses;
        entry["clusters"].push_back(std::move(c));
      }
      root["rounds"].push_back(std::move(entry));
    }
  }
  return root;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "epsilon,min_pts,clusters_raw,clusters_promoted\r\n";
  for (const auto& r : rows) {
    out += format_double(r.epsilon);
    out += ',' + std::to_string(r.min_pts);
    out += ',' + std::to_string(r.clusters_raw);
    out += ',' + std::to_string(r.clusters_promoted);
    out += "\r\n";
  }
  return out;
}

int cli_run(const CliOptions& opts) {
  return guarded([&] {
    const std::string started = utc_now();
    const ExperimentConfig cfg = load_cli_config(opts);
    const int threads = threads_from_env();

    const auto runs = run_experiment(cfg, cfg.mode, threads);

    const std::filesystem::path out_dir(opts.out_dir);
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "rounds.csv", rounds_csv(runs));
    write_file(out_dir / "clusters.json", clusters_json(runs).dump(2) + "\n");
    const auto manifest =
        manifest_json(cfg, cfg.mode, started, {"rounds.csv", "clusters.json"});
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  });
}

int cli_sweep(const CliOptions& opts) {
  return guarded([&] {
    const std::string started = utc_now();
    const ExperimentConfig cfg = load_cli_config(opts);
    const int threads = threads_from_env();

    const auto points = probe_population(cfg, threads);
    const HpMetric metric = cfg.cluster_lr_only ? HpMetric(distance_lr_only) : HpMetric(distance);
    const auto rows = sweep(points, cfg.sweep.epsilons, cfg.sweep.min_pts, metric);

    const std::filesystem::path out_dir(opts.out_dir);
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "sweep.csv", sweep_csv(rows));
    const auto manifest = manifest_json(cfg, cfg.mode, started, {"sweep.csv"});
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  });
}

}  // namespace gencfl
