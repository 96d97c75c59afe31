#include "gencfl/genetic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gencfl {

namespace {

// Factor application on raw coordinates; rounding and clamping happen once,
// after the factor, so fractional crossover means are not truncated early.
HyperParams mutate_raw(double lr, double batch_size, const HpBounds& bounds, GeneticRng& rng) {
  const int f_lr = rng.mutation_factor();
  const int f_bs = rng.mutation_factor();
  return clamp(lr * (1.0 + f_lr / 10.0), batch_size * (1.0 + f_bs / 10.0), bounds);
}

}  // namespace

HyperParams mutate(const HyperParams& hp, const HpBounds& bounds, GeneticRng& rng) {
  return mutate_raw(hp.lr, static_cast<double>(hp.batch_size), bounds, rng);
}

std::vector<HyperParams> crossover(const Population& pop, int elite_count,
                                   const HpBounds& bounds, GeneticRng& rng) {
  if (pop.members.empty()) throw std::invalid_argument("crossover: empty population");
  if (elite_count < 1) throw std::invalid_argument("crossover: elite_count < 1");

  const std::size_t n = pop.members.size();
  const std::size_t elites = std::min(static_cast<std::size_t>(elite_count), n);

  std::vector<HyperParams> next;
  next.reserve(n);
  for (std::size_t i = 0; i < elites; ++i) next.push_back(pop.members[i]);
  for (std::size_t i = elites; i < n; ++i) {
    const HyperParams& pa = pop.members[rng.parent_index(n)];
    const HyperParams& pb = pop.members[rng.parent_index(n)];
    const double lr = 0.5 * (pa.lr + pb.lr);
    const double bs = 0.5 * (static_cast<double>(pa.batch_size) +
                             static_cast<double>(pb.batch_size));
    next.push_back(mutate_raw(lr, bs, bounds, rng));
  }
  return next;
}

Population evolve(const Population& pop, int elite_count, const HpBounds& bounds,
                  GeneticRng& rng) {
  if (pop.members.empty()) throw std::invalid_argument("evolve: empty population");
  if (pop.losses.size() != pop.members.size()) {
    throw std::invalid_argument("evolve: losses and members must be the same length");
  }

  std::vector<std::size_t> order(pop.members.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pop.losses[a] < pop.losses[b];
  });

  Population sorted;
  sorted.members.reserve(pop.members.size());
  sorted.losses.reserve(pop.losses.size());
  for (std::size_t i : order) {
    sorted.members.push_back(pop.members[i]);
    sorted.losses.push_back(pop.losses[i]);
  }

  Population next;
  next.members = crossover(sorted, elite_count, bounds, rng);
  return next;  // losses unknown until the next training round
}

}  // namespace gencfl
