#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gencfl/rng.hpp"

using namespace gencfl;

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 2, 4));
  CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
  CHECK(mix_seed(1) != mix_seed(2));
  CHECK(mix_seed(7, 11, 13) == mix_seed(7, 11, 13));
}

TEST_CASE("uniform stays in range and is deterministic") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(x == b.uniform());
  }
}

TEST_CASE("uniform_int covers the inclusive range") {
  Rng rng(7);
  std::set<long> seen;
  for (int i = 0; i < 2000; ++i) {
    const long v = rng.uniform_int(-2, 3);
    CHECK(v >= -2);
    CHECK(v <= 3);
    seen.insert(v);
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(11);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  auto shuffled = v;
  rng.shuffle(shuffled);
  CHECK(shuffled != v);
  std::sort(shuffled.begin(), shuffled.end());
  CHECK(shuffled == v);
}

TEST_CASE("sample_without_replacement yields distinct in-range values") {
  Rng rng(3);
  const auto s = rng.sample_without_replacement(50, 20);
  CHECK(s.size() == 20);
  std::set<int> uniq(s.begin(), s.end());
  CHECK(uniq.size() == 20);
  for (int v : s) {
    CHECK(v >= 0);
    CHECK(v < 50);
  }
}

TEST_CASE("gamma moments roughly match") {
  Rng rng(5);
  const double alpha = 2.5;
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += rng.gamma(alpha);
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(alpha).epsilon(0.05));
}

TEST_CASE("dirichlet sums to one") {
  Rng rng(9);
  for (double alpha : {0.1, 1.0, 10.0}) {
    const auto p = rng.dirichlet(alpha, 10);
    CHECK(p.size() == 10);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : p) CHECK(v >= 0.0);
  }
}
