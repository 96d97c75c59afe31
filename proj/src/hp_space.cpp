#include "gencfl/hp_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gencfl {

void HpBounds::validate() const {
  if (!(lr_min > 0.0) || !(lr_min < lr_max)) {
    throw std::invalid_argument("HpBounds: need 0 < lr_min < lr_max");
  }
  if (bs_min < 1 || bs_min > bs_max) {
    throw std::invalid_argument("HpBounds: need 1 <= bs_min <= bs_max");
  }
}

double distance(const HyperParams& a, const HyperParams& b) {
  if (!(a.lr > 0.0) || !(b.lr > 0.0) || a.batch_size <= 0 || b.batch_size <= 0) {
    throw std::invalid_argument("distance: hyper-parameters must be positive");
  }
  const double dl = std::log10(a.lr / b.lr);
  const double db = std::log2(static_cast<double>(a.batch_size) /
                              static_cast<double>(b.batch_size));
  return std::sqrt(dl * dl + db * db);
}

double distance_lr_only(const HyperParams& a, const HyperParams& b) {
  if (!(a.lr > 0.0) || !(b.lr > 0.0)) {
    throw std::invalid_argument("distance_lr_only: learning rates must be positive");
  }
  return std::abs(std::log10(a.lr / b.lr));
}

HyperParams clamp(double lr, double batch_size, const HpBounds& bounds) {
  bounds.validate();
  HyperParams out;
  out.lr = std::clamp(lr, bounds.lr_min, bounds.lr_max);
  const long rounded = std::lround(batch_size);
  out.batch_size = static_cast<int>(
      std::clamp(rounded, static_cast<long>(bounds.bs_min), static_cast<long>(bounds.bs_max)));
  return out;
}

HyperParams clamp(const HyperParams& hp, const HpBounds& bounds) {
  return clamp(hp.lr, static_cast<double>(hp.batch_size), bounds);
}

std::vector<int> power_of_two_batches(const HpBounds& bounds) {
  std::vector<int> out;
  for (long p = 1; p <= bounds.bs_max; p *= 2) {
    if (p >= bounds.bs_min) out.push_back(static_cast<int>(p));
  }
  return out;
}

HyperParams sample(const HpBounds& bounds, Rng& rng) {
  bounds.validate();
  HyperParams hp;
  hp.lr = rng.log_uniform(bounds.lr_min, bounds.lr_max);
  const auto pows = power_of_two_batches(bounds);
  if (pows.empty()) {
    hp.batch_size = static_cast<int>(rng.uniform_int(bounds.bs_min, bounds.bs_max));
  } else {
    hp.batch_size = pows[rng.index(pows.size())];
  }
  return hp;
}

HyperParams sample(const HpBounds& bounds, std::uint64_t seed) {
  Rng rng(seed);
  return sample(bounds, rng);
}

}  // namespace gencfl
