#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gencfl/hp_space.hpp"
#include "gencfl/rng.hpp"

using namespace gencfl;

TEST_CASE("distance on identical points is zero") {
  const HyperParams a{1e-3, 32};
  CHECK(distance(a, a) == 0.0);
}

TEST_CASE("distance matches hand-substituted values") {
  CHECK(distance({1e-3, 32}, {1e-4, 64}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(distance({1e-2, 16}, {1e-5, 128}) == doctest::Approx(std::sqrt(18.0)).epsilon(1e-12));
}

TEST_CASE("distance rejects non-positive coordinates") {
  CHECK_THROWS_AS(distance({0.0, 32}, {1e-3, 32}), std::invalid_argument);
  CHECK_THROWS_AS(distance({1e-3, 0}, {1e-3, 32}), std::invalid_argument);
}

TEST_CASE("distance is a metric on log coordinates") {
  HpBounds bounds;
  Rng rng(1234);
  for (int trial = 0; trial < 10000; ++trial) {
    const HyperParams a = sample(bounds, rng);
    const HyperParams b = sample(bounds, rng);
    const HyperParams c = sample(bounds, rng);
    const double dab = distance(a, b);
    const double dba = distance(b, a);
    const double dac = distance(a, c);
    const double dcb = distance(c, b);
    CHECK(dab == dba);                      // symmetry
    CHECK(dab >= 0.0);
    CHECK(dab <= dac + dcb + 1e-12);        // triangle inequality
    if (a == b) CHECK(dab == 0.0);
  }
  // identity of indiscernibles, the other direction
  const HyperParams x{3.7e-4, 48};
  CHECK(distance(x, x) == 0.0);
  CHECK(distance(x, {3.7e-4 * 1.001, 48}) > 0.0);
}

TEST_CASE("clamp rounds then clamps") {
  HpBounds bounds;
  SUBCASE("lr above the cap") {
    const auto hp = clamp(2e-1, 32, bounds);
    CHECK(hp.lr == 1e-1);
    CHECK(hp.batch_size == 32);
  }
  SUBCASE("fractional batch below bs_min") {
    const auto hp = clamp(1e-3, 12.4, bounds);
    CHECK(hp.lr == 1e-3);
    CHECK(hp.batch_size == 16);
  }
  SUBCASE("in-bounds input is unchanged") {
    const auto hp = clamp(1e-3, 32.0, bounds);
    CHECK(hp == HyperParams{1e-3, 32});
  }
  SUBCASE("idempotent") {
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
      const auto once = clamp(rng.uniform(0.0, 1.0), rng.uniform(0.0, 300.0), bounds);
      const auto twice = clamp(once, bounds);
      CHECK(once == twice);
    }
  }
}

TEST_CASE("sample respects bounds and powers of two") {
  HpBounds bounds;
  Rng rng(99);
  for (int i = 0; i < 10000; ++i) {
    const auto hp = sample(bounds, rng);
    CHECK(hp.lr >= bounds.lr_min);
    CHECK(hp.lr <= bounds.lr_max);
    const bool pow2 = hp.batch_size == 16 || hp.batch_size == 32 || hp.batch_size == 64 ||
                      hp.batch_size == 128;
    CHECK(pow2);
  }
}

TEST_CASE("sample is deterministic per seed") {
  HpBounds bounds;
  CHECK(sample(bounds, std::uint64_t{123}) == sample(bounds, std::uint64_t{123}));
  CHECK(sample(bounds, std::uint64_t{123}) != sample(bounds, std::uint64_t{124}));
}

TEST_CASE("log10(lr) is approximately uniform (Kolmogorov-Smirnov)") {
  HpBounds bounds;
  Rng rng(2024);
  const int n = 10000;
  std::vector<double> u(n);
  const double lo = std::log10(bounds.lr_min), hi = std::log10(bounds.lr_max);
  for (int i = 0; i < n; ++i) {
    u[static_cast<std::size_t>(i)] = (std::log10(sample(bounds, rng).lr) - lo) / (hi - lo);
  }
  std::sort(u.begin(), u.end());
  double d_stat = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = u[static_cast<std::size_t>(i)];
    d_stat = std::max(d_stat, std::abs(cdf - (i + 1.0) / n));
    d_stat = std::max(d_stat, std::abs(cdf - static_cast<double>(i) / n));
  }
  // critical value at p = 0.01 is 1.63 / sqrt(n)
  CHECK(d_stat < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("power_of_two_batches handles ranges without powers") {
  CHECK(power_of_two_batches({1e-7, 1e-1, 16, 128}) == std::vector<int>{16, 32, 64, 128});
  CHECK(power_of_two_batches({1e-7, 1e-1, 17, 31}).empty());
  Rng rng(5);
  const auto hp = sample({1e-7, 1e-1, 17, 31}, rng);
  CHECK(hp.batch_size >= 17);
  CHECK(hp.batch_size <= 31);
}

TEST_CASE("bounds validation") {
  CHECK_THROWS_AS(HpBounds{0.0, 1e-1, 16, 128}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(HpBounds{1e-1, 1e-7, 16, 128}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(HpBounds{1e-7, 1e-1, 128, 16}.validate(), std::invalid_argument);
}
