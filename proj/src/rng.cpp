#include "gencfl/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace gencfl {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  state ^= a + 0x632be59bd9b4e019ULL;
  out ^= splitmix64(state);
  state ^= b + 0x9e6c63d0876a9a47ULL;
  out ^= splitmix64(state);
  state ^= c + 0xd2b74407b1ce6e93ULL;
  out ^= splitmix64(state);
  return out;
}

double Rng::uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::log_uniform(double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("log_uniform requires 0 < lo < hi");
  }
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

long Rng::uniform_int(long lo, long hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<long>(gen_());  // full 64-bit span
  const std::uint64_t reject_below = (-range) % range;  // 2^64 mod range
  std::uint64_t x = gen_();
  while (x < reject_below) x = gen_();
  return lo + static_cast<long>(x % range);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("index: n == 0");
  return static_cast<std::size_t>(uniform_int(0, static_cast<long>(n) - 1));
}

double Rng::normal() {
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double Rng::gamma(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gamma: alpha <= 0");
  if (alpha < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    double u = uniform();
    while (u == 0.0) u = uniform();
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::vector<double> Rng::dirichlet(double alpha, int k) {
  if (k < 1) throw std::invalid_argument("dirichlet: k < 1");
  std::vector<double> p(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (auto& v : p) {
    v = gamma(alpha);
    sum += v;
  }
  if (sum <= 0.0 || !std::isfinite(sum)) {
    // All draws underflowed (tiny alpha): collapse onto one component.
    std::fill(p.begin(), p.end(), 0.0);
    p[index(p.size())] = 1.0;
    return p;
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("sample_without_replacement: k out of range");
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::vector<int> out(static_cast<std::size_t>(k));
  // Partial Fisher-Yates: the first k swaps fix the sample.
  for (int i = 0; i < k; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + index(pool.size() - static_cast<std::size_t>(i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    out[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace gencfl
