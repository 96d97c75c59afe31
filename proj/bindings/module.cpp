#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "gencfl/clustering.hpp"
#include "gencfl/config.hpp"
#include "gencfl/data.hpp"
#include "gencfl/errors.hpp"
#include "gencfl/fl_engine.hpp"
#include "gencfl/genetic.hpp"
#include "gencfl/hp_space.hpp"
#include "gencfl/nn.hpp"
#include "gencfl/runner.hpp"

namespace py = pybind11;
using namespace gencfl;

namespace {

// Keeps a Dataset alive alongside the index list a view needs.
struct OwningView {
  std::shared_ptr<const Dataset> ds;
  std::vector<int> indices;

  DatasetView view() const { return DatasetView(*ds, indices); }
};

py::dict round_metrics_dict(const RoundMetrics& rm) {
  py::dict d;
  d["round"] = rm.round;
  d["accuracy"] = rm.server_accuracy;
  d["loss"] = rm.server_loss;
  py::list clusters;
  for (const auto& cp : rm.per_cluster) {
    py::dict c;
    c["cluster_id"] = cp.cluster_id;
    c["client_ids"] = cp.client_ids;
    py::list members;
    for (const auto& hp : cp.members) members.append(py::make_tuple(hp.lr, hp.batch_size));
    c["members"] = members;
    c["losses"] = cp.losses;
    clusters.append(c);
  }
  d["clusters"] = clusters;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Genetic clustered federated learning simulator";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_IOError);
  py::register_exception<EngineError>(m, "EngineError", PyExc_RuntimeError);

  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<double, int>(), py::arg("lr") = 1e-3, py::arg("batch_size") = 32)
      .def_readwrite("lr", &HyperParams::lr)
      .def_readwrite("batch_size", &HyperParams::batch_size)
      .def("__eq__", [](const HyperParams& a, const HyperParams& b) { return a == b; })
      .def("__repr__", [](const HyperParams& hp) {
        return "HyperParams(lr=" + std::to_string(hp.lr) +
               ", batch_size=" + std::to_string(hp.batch_size) + ")";
      });

  py::class_<HpBounds>(m, "HpBounds")
      .def(py::init<double, double, int, int>(), py::arg("lr_min") = 1e-7,
           py::arg("lr_max") = 1e-1, py::arg("bs_min") = 16, py::arg("bs_max") = 128)
      .def_readwrite("lr_min", &HpBounds::lr_min)
      .def_readwrite("lr_max", &HpBounds::lr_max)
      .def_readwrite("bs_min", &HpBounds::bs_min)
      .def_readwrite("bs_max", &HpBounds::bs_max);

  m.def("distance", &distance, "Log-scale metric over hyper-parameter pairs");
  m.def("distance_lr_only", &distance_lr_only);
  m.def("clamp",
        py::overload_cast<double, double, const HpBounds&>(&clamp), py::arg("lr"),
        py::arg("batch_size"), py::arg("bounds"));
  m.def("sample_hp",
        [](const HpBounds& bounds, std::uint64_t seed) { return sample(bounds, seed); },
        py::arg("bounds"), py::arg("seed"));

  py::class_<DbscanParams>(m, "DbscanParams")
      .def(py::init<double, int>(), py::arg("epsilon") = 0.2, py::arg("min_pts") = 2)
      .def_readwrite("epsilon", &DbscanParams::epsilon)
      .def_readwrite("min_pts", &DbscanParams::min_pts);

  py::class_<ClusterAssignment>(m, "ClusterAssignment")
      .def_readonly("labels", &ClusterAssignment::labels)
      .def_readonly("n_clusters", &ClusterAssignment::n_clusters)
      .def_readonly("raw_labels", &ClusterAssignment::raw_labels)
      .def_readonly("n_raw_clusters", &ClusterAssignment::n_raw_clusters)
      .def("members", &ClusterAssignment::members);

  m.def(
      "dbscan",
      [](const std::vector<HyperParams>& points, const DbscanParams& params, bool lr_only) {
        return dbscan(points, params, lr_only ? HpMetric(distance_lr_only) : HpMetric(distance));
      },
      py::arg("points"), py::arg("params"), py::arg("lr_only") = false);

  py::class_<Population>(m, "Population")
      .def(py::init([](std::vector<HyperParams> members, std::vector<double> losses) {
             Population p;
             p.members = std::move(members);
             p.losses = std::move(losses);
             return p;
           }),
           py::arg("members"), py::arg("losses"))
      .def_readwrite("members", &Population::members)
      .def_readwrite("losses", &Population::losses);

  m.def(
      "mutate",
      [](const HyperParams& hp, const HpBounds& bounds, std::uint64_t seed) {
        SeededGeneticRng rng(seed);
        return mutate(hp, bounds, rng);
      },
      py::arg("hp"), py::arg("bounds"), py::arg("seed"));
  m.def(
      "evolve",
      [](const Population& pop, int elite_count, const HpBounds& bounds, std::uint64_t seed) {
        SeededGeneticRng rng(seed);
        return evolve(pop, elite_count, bounds, rng);
      },
      py::arg("population"), py::arg("elite_count"), py::arg("bounds"), py::arg("seed"));

  py::class_<ModelArch>(m, "ModelArch")
      .def(py::init([](std::vector<int> sizes) {
             ModelArch a{std::move(sizes)};
             a.validate();
             return a;
           }),
           py::arg("layer_sizes"))
      .def_readonly("layer_sizes", &ModelArch::layer_sizes);

  py::class_<ModelWeights>(m, "ModelWeights")
      .def_readwrite("weights", &ModelWeights::weights)
      .def_readwrite("biases", &ModelWeights::biases)
      .def("all_finite", &ModelWeights::all_finite)
      .def("parameter_count", &ModelWeights::parameter_count);

  m.def("init_weights", &init_weights, py::arg("arch"), py::arg("seed"));
  m.def("aggregate", &aggregate, py::arg("models"));

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("final_loss", &TrainReport::final_loss)
      .def_readonly("epochs_run", &TrainReport::epochs_run)
      .def_readonly("samples_seen", &TrainReport::samples_seen)
      .def_readonly("diverged", &TrainReport::diverged);

  py::class_<Dataset, std::shared_ptr<Dataset>>(m, "Dataset")
      .def(py::init([](const Eigen::MatrixXd& images, std::vector<int> labels, int classes) {
             auto ds = std::make_shared<Dataset>();
             ds->images = images;
             ds->labels = std::move(labels);
             ds->classes = classes;
             return ds;
           }),
           py::arg("images"), py::arg("labels"), py::arg("classes"))
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("dim", &Dataset::dim)
      .def_readonly("classes", &Dataset::classes)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("images", &Dataset::images);

  m.def("load_idx", [](const std::string& images, const std::string& labels) {
    return std::make_shared<Dataset>(load_idx(images, labels));
  });

  m.def(
      "partition_non_iid",
      [](std::shared_ptr<Dataset> ds, int n_clients, int min_size, int max_size, double skew,
         bool disjoint, std::uint64_t seed) {
        PartitionOptions opts{min_size, max_size, skew, disjoint};
        return partition_non_iid(*ds, n_clients, opts, seed).shards;
      },
      py::arg("dataset"), py::arg("n_clients"), py::arg("min_size"), py::arg("max_size"),
      py::arg("skew") = 0.5, py::arg("disjoint") = false, py::arg("seed") = 1);

  m.def(
      "train",
      [](const ModelWeights& w, std::shared_ptr<Dataset> ds, std::vector<int> indices,
         const HyperParams& hp, int epochs, std::uint64_t seed) {
        auto [out, report] = train(w, DatasetView(*ds, indices), hp, epochs, seed);
        return py::make_tuple(out, report);
      },
      py::arg("weights"), py::arg("dataset"), py::arg("indices"), py::arg("hp"),
      py::arg("epochs"), py::arg("seed"));

  m.def(
      "evaluate",
      [](const ModelWeights& w, std::shared_ptr<Dataset> ds, std::vector<int> indices) {
        if (indices.empty()) indices = all_indices(*ds);
        const EvalResult r = evaluate(w, DatasetView(*ds, indices));
        return py::make_tuple(r.accuracy, r.loss);
      },
      py::arg("weights"), py::arg("dataset"), py::arg("indices") = std::vector<int>{});

  m.def("example_config_text", &example_config_text);

  m.def(
      "run_experiment",
      [](const std::string& config_path, const std::string& mode, std::uint64_t seed,
         int threads) {
        ExperimentConfig cfg = ExperimentConfig::load(config_path);
        if (seed != 0) cfg.seed = seed;
        const std::string selection = mode.empty() ? cfg.mode : mode;
        const auto runs = run_experiment(cfg, selection, threads);
        py::dict out;
        for (const auto& run : runs) {
          py::list rounds;
          for (const auto& rm : run.rounds) rounds.append(round_metrics_dict(rm));
          out[py::str(to_string(run.mode))] = rounds;
        }
        return out;
      },
      py::arg("config_path"), py::arg("mode") = "", py::arg("seed") = 0, py::arg("threads") = 0);
}
