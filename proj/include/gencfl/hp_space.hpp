#pragma once

#include <vector>

#include "gencfl/rng.hpp"

namespace gencfl {

// The per-client training genome: everything clustering and evolution act on.
struct HyperParams {
  double lr = 1e-3;
  int batch_size = 32;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

struct HpBounds {
  double lr_min = 1e-7;
  double lr_max = 1e-1;
  int bs_min = 16;
  int bs_max = 128;

  void validate() const;  // throws std::invalid_argument
};

// Distance in log coordinates: decades for the learning rate, octaves for the
// batch size. Both inputs must have positive lr and batch_size.
double distance(const HyperParams& a, const HyperParams& b);

// Same metric restricted to the learning-rate axis.
double distance_lr_only(const HyperParams& a, const HyperParams& b);

// Rounds batch_size to the nearest integer, then clamps both coordinates into
// bounds. Genetic arithmetic produces fractional batch sizes; this is the one
// place they are normalized.
HyperParams clamp(double lr, double batch_size, const HpBounds& bounds);
HyperParams clamp(const HyperParams& hp, const HpBounds& bounds);

// lr log-uniform over [lr_min, lr_max]; batch size a uniformly chosen power of
// two within [bs_min, bs_max] (plain uniform integer if the range contains no
// power of two).
HyperParams sample(const HpBounds& bounds, Rng& rng);
HyperParams sample(const HpBounds& bounds, std::uint64_t seed);

// Powers of two inside [bs_min, bs_max], ascending.
std::vector<int> power_of_two_batches(const HpBounds& bounds);

}  // namespace gencfl
