#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gencfl/errors.hpp"

namespace gencfl {

struct Dataset {
  Eigen::MatrixXd images;   // N x D, values in [0, 1]
  std::vector<int> labels;  // N entries in [0, classes)
  int classes = 0;

  Eigen::Index n() const { return images.rows(); }
  Eigen::Index dim() const { return images.cols(); }
};

// Non-owning view of a subset of a dataset's rows.
class DatasetView {
 public:
  DatasetView(const Dataset& ds, std::span<const int> indices)
      : ds_(&ds), indices_(indices) {}

  const Dataset& dataset() const { return *ds_; }
  std::span<const int> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

 private:
  const Dataset* ds_;
  std::span<const int> indices_;
};

// Identity index list for viewing a whole dataset.
std::vector<int> all_indices(const Dataset& ds);

// Reads an IDX image/label file pair (big-endian; magic 0x00000803 for images,
// 0x00000801 for labels). Pixels are scaled by 1/255. The class count is
// max(label) + 1.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

struct PartitionOptions {
  int min_size = 1;
  int max_size = 1;
  double skew = 0.5;      // 0 = match the global label mix, 1 = maximally skewed
  bool disjoint = false;  // forbid index reuse across shards
};

struct ShardPlan {
  std::vector<std::vector<int>> shards;  // one index list per client
  std::uint64_t seed = 0;
};

// Gives each client a uniformly random number of samples in
// [min_size, max_size]. Indices are unique within a shard; shards may overlap
// unless disjoint is set. skew controls label heterogeneity: each skewed
// client draws its labels from a Dirichlet mix over a restricted class
// support (alpha runs from infinity at skew=0 down to 0.1 at skew=1, and the
// support shrinks to two classes at skew=1).
ShardPlan partition_non_iid(const Dataset& ds, int n_clients,
                            const PartitionOptions& opts, std::uint64_t seed);

}  // namespace gencfl
