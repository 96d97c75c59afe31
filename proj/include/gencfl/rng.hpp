#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gencfl {

// Mixes a master seed with stream/index tags into an independent sub-seed.
// Results must not depend on call order anywhere in the engine, so every
// client/round/cluster derives its own seed through this instead of pulling
// from a shared generator.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                       std::uint64_t c = 0);

// Seeded generator with hand-rolled value mappings. std::mt19937_64 output is
// pinned by the standard, but the std distributions are not; mapping raw bits
// ourselves keeps sequences identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform in log space over [lo, hi), lo > 0.
  double log_uniform(double lo, double hi);
  /// Uniform integer in [lo, hi], inclusive, rejection sampled (no modulo bias).
  long uniform_int(long lo, long hi);
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

  /// Standard normal via the Marsaglia polar method.
  double normal();
  /// Gamma(alpha, 1) via Marsaglia-Tsang squeeze.
  double gamma(double alpha);
  /// Symmetric Dirichlet(alpha) over k components.
  std::vector<double> dirichlet(double alpha, int k);

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  /// k distinct values from [0, n), in draw order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 gen_;
};

}  // namespace gencfl
