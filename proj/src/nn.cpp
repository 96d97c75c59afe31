#include "gencfl/nn.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gencfl/rng.hpp"

namespace gencfl {

namespace {

// Forward pass keeping the post-activation of every layer; activations[0] is
// the input batch, activations.back() holds raw logits.
std::vector<Eigen::MatrixXd> forward(const ModelWeights& w,
                                     const Eigen::Ref<const Eigen::MatrixXd>& x) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(w.weights.size() + 1);
  acts.emplace_back(x);
  for (std::size_t l = 0; l < w.weights.size(); ++l) {
    Eigen::MatrixXd z = (acts.back() * w.weights[l]).rowwise() + w.biases[l].transpose();
    if (l + 1 < w.weights.size()) z = z.cwiseMax(0.0);  // ReLU on hidden layers
    acts.emplace_back(std::move(z));
  }
  return acts;
}

// Row-wise log-sum-exp, stabilized by the row maximum.
Eigen::VectorXd row_logsumexp(const Eigen::MatrixXd& logits) {
  Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  Eigen::VectorXd out(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    out(i) = row_max(i) + std::log((logits.row(i).array() - row_max(i)).exp().sum());
  }
  return out;
}

Eigen::MatrixXd gather_rows(const Dataset& ds, std::span<const int> idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), ds.dim());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = ds.images.row(idx[i]);
  }
  return out;
}

}  // namespace

void ModelArch::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("ModelArch: need at least input and output layers");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("ModelArch: every layer size must be >= 1");
  }
}

ModelWeights ModelWeights::zeros(const ModelArch& arch) {
  arch.validate();
  ModelWeights w;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    w.weights.emplace_back(
        Eigen::MatrixXd::Zero(arch.layer_sizes[l], arch.layer_sizes[l + 1]));
    w.biases.emplace_back(Eigen::VectorXd::Zero(arch.layer_sizes[l + 1]));
  }
  return w;
}

bool ModelWeights::same_shape(const ModelWeights& other) const {
  if (weights.size() != other.weights.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() ||
        weights[l].cols() != other.weights[l].cols() ||
        biases[l].size() != other.biases[l].size()) {
      return false;
    }
  }
  return true;
}

bool ModelWeights::all_finite() const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

std::size_t ModelWeights::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size()) + static_cast<std::size_t>(biases[l].size());
  }
  return n;
}

ModelWeights init_weights(const ModelArch& arch, std::uint64_t seed) {
  arch.validate();
  ModelWeights w = ModelWeights::zeros(arch);
  Rng rng(mix_seed(seed, 0x1417));
  for (auto& layer : w.weights) {
    const double limit = std::sqrt(6.0 / (static_cast<double>(layer.rows()) +
                                          static_cast<double>(layer.cols())));
    for (Eigen::Index j = 0; j < layer.cols(); ++j) {
      for (Eigen::Index i = 0; i < layer.rows(); ++i) {
        layer(i, j) = rng.uniform(-limit, limit);
      }
    }
  }
  return w;
}

Eigen::MatrixXd predict_proba(const ModelWeights& w, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const Eigen::MatrixXd logits = forward(w, x).back();
  Eigen::MatrixXd proba(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - m).exp();
    proba.row(i) = (e / e.sum()).matrix();
  }
  return proba;
}

BatchGradients loss_and_gradients(const ModelWeights& w, const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  std::span<const int> y) {
  if (x.rows() == 0) throw std::invalid_argument("loss_and_gradients: empty batch");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw std::invalid_argument("loss_and_gradients: x/y size mismatch");
  }
  const auto acts = forward(w, x);
  const Eigen::MatrixXd& logits = acts.back();
  const Eigen::Index m = x.rows();

  const Eigen::VectorXd lse = row_logsumexp(logits);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    loss += lse(i) - logits(i, y[static_cast<std::size_t>(i)]);
  }
  loss /= static_cast<double>(m);

  BatchGradients g;
  g.loss = loss;
  g.weight_grads.resize(w.weights.size());
  g.bias_grads.resize(w.biases.size());

  // delta starts as (softmax - onehot) / m at the output.
  Eigen::MatrixXd delta(m, logits.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    delta.row(i) = ((logits.row(i).array() - lse(i)).exp()).matrix();
    delta(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  }
  delta /= static_cast<double>(m);

  for (std::size_t l = w.weights.size(); l-- > 0;) {
    g.weight_grads[l] = acts[l].transpose() * delta;
    g.bias_grads[l] = delta.colwise().sum();
    if (l > 0) {
      delta = (delta * w.weights[l].transpose()).cwiseProduct(
          (acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

std::pair<ModelWeights, TrainReport> train(const ModelWeights& w, const DatasetView& shard,
                                           const HyperParams& hp, int epochs,
                                           std::uint64_t seed) {
  if (shard.empty()) throw std::invalid_argument("train: empty shard");
  if (!(hp.lr >= 0.0) || hp.batch_size < 1) {
    throw std::invalid_argument("train: invalid hyper-parameters");
  }
  if (epochs < 1) throw std::invalid_argument("train: epochs < 1");

  const Dataset& ds = shard.dataset();
  const Eigen::MatrixXd x = gather_rows(ds, shard.indices());
  std::vector<int> labels(shard.size());
  for (std::size_t i = 0; i < shard.size(); ++i) labels[i] = ds.labels[static_cast<std::size_t>(shard.indices()[i])];

  const std::size_t m = shard.size();
  ModelWeights out = w;
  TrainReport report;
  Rng rng(mix_seed(seed, 0x7121a));

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);

  Eigen::MatrixXd xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < m; start += static_cast<std::size_t>(hp.batch_size)) {
      const std::size_t bs = std::min(static_cast<std::size_t>(hp.batch_size), m - start);
      xb.resize(static_cast<Eigen::Index>(bs), x.cols());
      yb.resize(bs);
      for (std::size_t i = 0; i < bs; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = x.row(order[start + i]);
        yb[i] = labels[static_cast<std::size_t>(order[start + i])];
      }

      const BatchGradients g = loss_and_gradients(out, xb, yb);
      if (!std::isfinite(g.loss) || g.loss >= kLossCap) {
        report.final_loss = kLossCap;
        report.diverged = true;
        report.epochs_run = epoch + 1;
        return {std::move(out), report};
      }
      epoch_loss += g.loss * static_cast<double>(bs);

      for (std::size_t l = 0; l < out.weights.size(); ++l) {
        out.weights[l].noalias() -= hp.lr * g.weight_grads[l];
        out.biases[l].noalias() -= hp.lr * g.bias_grads[l];
      }
      report.samples_seen += static_cast<long>(bs);

      if (!out.all_finite()) {
        // The step itself overflowed; roll it back and report the cap.
        for (std::size_t l = 0; l < out.weights.size(); ++l) {
          out.weights[l].noalias() += hp.lr * g.weight_grads[l];
          out.biases[l].noalias() += hp.lr * g.bias_grads[l];
        }
        report.final_loss = kLossCap;
        report.diverged = true;
        report.epochs_run = epoch + 1;
        return {std::move(out), report};
      }
    }
    report.final_loss = epoch_loss / static_cast<double>(m);
    report.epochs_run = epoch + 1;
  }
  return {std::move(out), report};
}

EvalResult evaluate(const ModelWeights& w, const DatasetView& data) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset view");
  const Dataset& ds = data.dataset();

  constexpr std::size_t kChunk = 2048;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  Eigen::MatrixXd xb;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    const std::size_t bs = std::min(kChunk, data.size() - start);
    xb.resize(static_cast<Eigen::Index>(bs), ds.dim());
    for (std::size_t i = 0; i < bs; ++i) {
      xb.row(static_cast<Eigen::Index>(i)) = ds.images.row(data.indices()[start + i]);
    }
    const Eigen::MatrixXd logits = forward(w, xb).back();
    const Eigen::VectorXd lse = row_logsumexp(logits);
    for (std::size_t i = 0; i < bs; ++i) {
      const int label = ds.labels[static_cast<std::size_t>(data.indices()[start + i])];
      const auto row = logits.row(static_cast<Eigen::Index>(i));
      Eigen::Index argmax = 0;
      row.maxCoeff(&argmax);
      if (static_cast<int>(argmax) == label) ++correct;
      loss_sum += lse(static_cast<Eigen::Index>(i)) - row(label);
    }
  }
  EvalResult res;
  res.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  res.loss = loss_sum / static_cast<double>(data.size());
  return res;
}

}  // namespace gencfl
