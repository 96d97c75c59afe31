#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "gencfl/hp_space.hpp"
#include "gencfl/rng.hpp"

namespace gencfl {

// A cluster's genomes with the training losses from the round that produced
// them. losses is empty on a freshly evolved generation (no training yet).
struct Population {
  std::vector<HyperParams> members;
  std::vector<double> losses;
};

// Randomness consumed by the genetic operators, separated out so tests can pin
// the factor and parent choices.
class GeneticRng {
 public:
  virtual ~GeneticRng() = default;
  virtual int mutation_factor() = 0;                    // in {-1, 0, +1}
  virtual std::size_t parent_index(std::size_t n) = 0;  // in [0, n)
};

class SeededGeneticRng final : public GeneticRng {
 public:
  explicit SeededGeneticRng(std::uint64_t seed) : rng_(seed) {}
  int mutation_factor() override { return static_cast<int>(rng_.uniform_int(-1, 1)); }
  std::size_t parent_index(std::size_t n) override { return rng_.index(n); }

 private:
  Rng rng_;
};

// Per-coordinate x * (1 + factor/10) with factor drawn from {-1, 0, +1}
// independently for lr and batch size; the result is rounded and clamped.
HyperParams mutate(const HyperParams& hp, const HpBounds& bounds, GeneticRng& rng);

// pop must be sorted ascending by loss. Copies the first elite_count members
// unchanged and fills the rest with mutated arithmetic means of two parents
// drawn uniformly from the whole population (parents may coincide).
std::vector<HyperParams> crossover(const Population& pop, int elite_count,
                                   const HpBounds& bounds, GeneticRng& rng);

// Sorts members by ascending loss (stable; ties keep their original order),
// then applies crossover. The returned population has empty losses.
Population evolve(const Population& pop, int elite_count, const HpBounds& bounds,
                  GeneticRng& rng);

}  // namespace gencfl
