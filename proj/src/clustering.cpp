#include "gencfl/clustering.hpp"

#include <queue>
#include <stdexcept>

namespace gencfl {

namespace {

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

}  // namespace

void DbscanParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("DbscanParams: epsilon must be > 0");
  if (min_pts < 1) throw std::invalid_argument("DbscanParams: min_pts must be >= 1");
}

std::vector<std::vector<int>> ClusterAssignment::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  return out;
}

ClusterAssignment dbscan(std::span<const HyperParams> points, const DbscanParams& params,
                         const HpMetric& metric) {
  params.validate();
  if (points.empty()) throw std::invalid_argument("dbscan: no points");

  const int n = static_cast<int>(points.size());

  // Pairwise neighborhoods up front; populations stay small, O(n^2) is fine.
  std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (metric(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]) <
          params.epsilon) {
        neighbors[static_cast<std::size_t>(i)].push_back(j);
      }
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n), kUnvisited);
  int next_cluster = 0;
  std::queue<int> frontier;
  for (int i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] != kUnvisited) continue;
    if (static_cast<int>(neighbors[static_cast<std::size_t>(i)].size()) < params.min_pts) {
      labels[static_cast<std::size_t>(i)] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    labels[static_cast<std::size_t>(i)] = cluster;
    frontier.push(i);
    while (!frontier.empty()) {
      const int p = frontier.front();
      frontier.pop();
      if (static_cast<int>(neighbors[static_cast<std::size_t>(p)].size()) < params.min_pts) {
        continue;  // border point: claimed but not expanded
      }
      for (int q : neighbors[static_cast<std::size_t>(p)]) {
        int& lab = labels[static_cast<std::size_t>(q)];
        if (lab == kUnvisited) {
          lab = cluster;
          frontier.push(q);
        } else if (lab == kNoise) {
          lab = cluster;  // noise reachable from a core point becomes a border
        }
      }
    }
  }

  ClusterAssignment out;
  out.raw_labels = labels;
  out.n_raw_clusters = next_cluster;
  out.labels = labels;
  out.n_clusters = next_cluster;
  for (auto& lab : out.labels) {
    if (lab == kNoise) lab = out.n_clusters++;
  }
  return out;
}

std::vector<SweepRow> sweep(std::span<const HyperParams> points,
                            std::span<const double> epsilons, std::span<const int> min_pts_list,
                            const HpMetric& metric) {
  if (epsilons.empty() || min_pts_list.empty()) {
    throw std::invalid_argument("sweep: empty parameter lists");
  }
  std::vector<SweepRow> rows;
  rows.reserve(epsilons.size() * min_pts_list.size());
  for (double eps : epsilons) {
    for (int mp : min_pts_list) {
      const auto assignment = dbscan(points, DbscanParams{eps, mp}, metric);
      rows.push_back({eps, mp, assignment.n_raw_clusters, assignment.n_clusters});
    }
  }
  return rows;
}

}  // namespace gencfl
