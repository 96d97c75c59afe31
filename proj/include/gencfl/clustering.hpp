#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gencfl/hp_space.hpp"

namespace gencfl {

struct DbscanParams {
  double epsilon = 0.2;
  int min_pts = 2;

  void validate() const;  // throws std::invalid_argument
};

struct ClusterAssignment {
  // Final labels after noise promotion: contiguous ids in [0, n_clusters),
  // every cluster non-empty.
  std::vector<int> labels;
  int n_clusters = 0;
  // Labels as DBSCAN produced them, noise marked -1.
  std::vector<int> raw_labels;
  int n_raw_clusters = 0;

  int noise_count() const { return n_clusters - n_raw_clusters; }
  std::vector<std::vector<int>> members() const;  // point indices per cluster id
};

using HpMetric = std::function<double(const HyperParams&, const HyperParams&)>;

// Density clustering over hyper-parameter points. A point is core when at
// least min_pts points (itself included) lie within epsilon; clusters grow by
// density reachability in index scan order, and border points stay with the
// first cluster that reaches them. DBSCAN noise is then promoted: each noise
// point becomes its own singleton cluster, so every point ends up with a
// usable population.
ClusterAssignment dbscan(std::span<const HyperParams> points, const DbscanParams& params,
                         const HpMetric& metric);

struct SweepRow {
  double epsilon = 0.0;
  int min_pts = 0;
  int clusters_raw = 0;       // before noise promotion
  int clusters_promoted = 0;  // after
};

// Runs dbscan over the full epsilon x min_pts grid.
std::vector<SweepRow> sweep(std::span<const HyperParams> points,
                            std::span<const double> epsilons, std::span<const int> min_pts_list,
                            const HpMetric& metric);

}  // namespace gencfl
