#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gencfl/data.hpp"
#include "gencfl/hp_space.hpp"

namespace gencfl {

// Fully-connected net: ReLU hidden layers, softmax cross-entropy output.
struct ModelArch {
  std::vector<int> layer_sizes;  // input dim, hidden..., class count

  void validate() const;  // throws std::invalid_argument
  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
};

struct ModelWeights {
  // One (W, b) pair per layer transition; W is fan_in x fan_out.
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static ModelWeights zeros(const ModelArch& arch);
  bool same_shape(const ModelWeights& other) const;
  bool all_finite() const;
  std::size_t parameter_count() const;
};

struct TrainReport {
  double final_loss = 0.0;  // mean cross-entropy over the last completed epoch
  int epochs_run = 0;
  long samples_seen = 0;
  bool diverged = false;  // capped at kLossCap, training aborted early
};

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
};

struct BatchGradients {
  std::vector<Eigen::MatrixXd> weight_grads;
  std::vector<Eigen::VectorXd> bias_grads;
  double loss = 0.0;
};

// Batch losses at or above this value abort the client's training and are
// reported as exactly this cap, keeping diverged runs sortable.
inline constexpr double kLossCap = 1e3;

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
// Deterministic per seed.
ModelWeights init_weights(const ModelArch& arch, std::uint64_t seed);

// Mean cross-entropy loss and its gradients on one batch (x: rows are
// samples). Uses the log-sum-exp form, so the loss is finite for any finite
// logits.
BatchGradients loss_and_gradients(const ModelWeights& w, const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  std::span<const int> y);

// Softmax class probabilities for each row of x.
Eigen::MatrixXd predict_proba(const ModelWeights& w, const Eigen::Ref<const Eigen::MatrixXd>& x);

// Mini-batch SGD over the shard. The input weights are copied, never touched.
// Shuffling and batching are driven only by `seed`, so identical inputs give
// bitwise-identical outputs.
std::pair<ModelWeights, TrainReport> train(const ModelWeights& w, const DatasetView& shard,
                                           const HyperParams& hp, int epochs,
                                           std::uint64_t seed);

// Accuracy (argmax, first index wins ties) and mean cross-entropy.
EvalResult evaluate(const ModelWeights& w, const DatasetView& data);

}  // namespace gencfl
