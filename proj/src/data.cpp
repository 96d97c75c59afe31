#include "gencfl/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "gencfl/rng.hpp"

namespace gencfl {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) {
    throw DataError(DataError::Kind::Truncated, path + ": truncated IDX header");
  }
  return (static_cast<std::uint32_t>(buf[0]) << 24) |
         (static_cast<std::uint32_t>(buf[1]) << 16) |
         (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

std::vector<unsigned char> read_payload(std::istream& in, std::size_t count,
                                        const std::string& path) {
  std::vector<unsigned char> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw DataError(DataError::Kind::Truncated, path + ": truncated IDX payload");
  }
  return bytes;
}

// Largest-remainder apportionment of `total` slots over proportions p.
std::vector<int> apportion(const std::vector<double>& p, int total) {
  const std::size_t k = p.size();
  std::vector<int> quota(k, 0);
  std::vector<std::pair<double, std::size_t>> rem(k);
  int assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = p[i] * total;
    quota[i] = static_cast<int>(std::floor(exact));
    assigned += quota[i];
    rem[i] = {exact - std::floor(exact), i};
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;  // ties keep index order
  });
  for (int j = 0; j < total - assigned; ++j) {
    quota[rem[static_cast<std::size_t>(j) % k].second]++;
  }
  return quota;
}

// Removes `count` uniformly chosen entries from `pool` and appends them to
// `out`. The pool keeps its remaining elements (order perturbed).
void draw_from_pool(std::vector<int>& pool, int count, Rng& rng, std::vector<int>& out) {
  for (int i = 0; i < count; ++i) {
    const std::size_t j = rng.index(pool.size());
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
}

}  // namespace

std::vector<int> all_indices(const Dataset& ds) {
  std::vector<int> idx(static_cast<std::size_t>(ds.n()));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw DataError(DataError::Kind::Io, "cannot open " + images_path);
  if (read_u32_be(img, images_path) != kImageMagic) {
    throw DataError(DataError::Kind::BadMagic, images_path + ": bad IDX image magic");
  }
  const std::uint32_t n = read_u32_be(img, images_path);
  const std::uint32_t rows = read_u32_be(img, images_path);
  const std::uint32_t cols = read_u32_be(img, images_path);
  const std::size_t dim = static_cast<std::size_t>(rows) * cols;
  const auto pixels = read_payload(img, static_cast<std::size_t>(n) * dim, images_path);

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw DataError(DataError::Kind::Io, "cannot open " + labels_path);
  if (read_u32_be(lab, labels_path) != kLabelMagic) {
    throw DataError(DataError::Kind::BadMagic, labels_path + ": bad IDX label magic");
  }
  const std::uint32_t n_labels = read_u32_be(lab, labels_path);
  if (n_labels != n) {
    throw DataError(DataError::Kind::CountMismatch,
                    images_path + " has " + std::to_string(n) + " images but " + labels_path +
                        " has " + std::to_string(n_labels) + " labels");
  }
  const auto raw_labels = read_payload(lab, n_labels, labels_path);

  Dataset ds;
  ds.images.resize(n, static_cast<Eigen::Index>(dim));
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      ds.images(i, static_cast<Eigen::Index>(d)) = pixels[i * dim + d] / 255.0;
    }
  }
  ds.labels.assign(raw_labels.begin(), raw_labels.end());
  int max_label = -1;
  for (int l : ds.labels) max_label = std::max(max_label, l);
  ds.classes = max_label + 1;
  return ds;
}

ShardPlan partition_non_iid(const Dataset& ds, int n_clients,
                            const PartitionOptions& opts, std::uint64_t seed) {
  const int n = static_cast<int>(ds.n());
  if (n_clients < 1) throw std::invalid_argument("partition_non_iid: n_clients < 1");
  if (opts.min_size < 1 || opts.min_size > opts.max_size || opts.max_size > n) {
    throw std::invalid_argument("partition_non_iid: need 1 <= min_size <= max_size <= N");
  }
  if (opts.skew < 0.0 || opts.skew > 1.0) {
    throw std::invalid_argument("partition_non_iid: skew outside [0, 1]");
  }

  // Per-class index pools. In disjoint mode they are consumed across clients;
  // otherwise each client works on a fresh copy.
  std::vector<std::vector<int>> class_pools(static_cast<std::size_t>(std::max(ds.classes, 1)));
  for (int i = 0; i < n; ++i) {
    class_pools[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])].push_back(i);
  }
  std::vector<int> full_pool = all_indices(ds);

  ShardPlan plan;
  plan.seed = seed;
  plan.shards.resize(static_cast<std::size_t>(n_clients));

  const int classes = ds.classes;
  for (int c = 0; c < n_clients; ++c) {
    Rng rng(mix_seed(seed, 0xda7a, static_cast<std::uint64_t>(c)));
    const int size = static_cast<int>(rng.uniform_int(opts.min_size, opts.max_size));
    auto& shard = plan.shards[static_cast<std::size_t>(c)];
    shard.reserve(static_cast<std::size_t>(size));

    if (opts.skew == 0.0 || classes < 2) {
      std::vector<int> copy;
      if (!opts.disjoint) copy = full_pool;
      std::vector<int>& use = opts.disjoint ? full_pool : copy;
      if (static_cast<int>(use.size()) < size) {
        throw std::invalid_argument("partition_non_iid: disjoint mode exhausted the dataset");
      }
      draw_from_pool(use, size, rng, shard);
      continue;
    }

    // Label-skewed shard: restricted class support with Dirichlet proportions.
    const double skew = opts.skew;
    int support = static_cast<int>(std::lround(classes * (1.0 - skew) + 2.0 * skew));
    support = std::clamp(support, std::min(2, classes), classes);
    const double alpha = 0.1 + (1.0 - skew) / skew;

    std::vector<int> chosen = rng.sample_without_replacement(classes, support);
    const std::vector<double> props = rng.dirichlet(alpha, support);
    std::vector<int> quota = apportion(props, size);

    std::vector<std::vector<int>> local;
    std::vector<std::vector<int>>* pools = &class_pools;
    if (!opts.disjoint) {
      local = class_pools;
      pools = &local;
    }

    int deficit = 0;
    for (int s = 0; s < support; ++s) {
      auto& pool = (*pools)[static_cast<std::size_t>(chosen[static_cast<std::size_t>(s)])];
      const int take = std::min(quota[static_cast<std::size_t>(s)], static_cast<int>(pool.size()));
      deficit += quota[static_cast<std::size_t>(s)] - take;
      draw_from_pool(pool, take, rng, shard);
    }
    // Spill overflow into support classes with room, then anywhere.
    for (int pass = 0; pass < 2 && deficit > 0; ++pass) {
      for (int cls = 0; cls < classes && deficit > 0; ++cls) {
        const bool in_support =
            std::find(chosen.begin(), chosen.end(), cls) != chosen.end();
        if ((pass == 0) != in_support) continue;
        auto& pool = (*pools)[static_cast<std::size_t>(cls)];
        const int take = std::min(deficit, static_cast<int>(pool.size()));
        draw_from_pool(pool, take, rng, shard);
        deficit -= take;
      }
    }
    if (deficit > 0) {
      throw std::invalid_argument("partition_non_iid: disjoint mode exhausted the dataset");
    }
  }
  return plan;
}

}  // namespace gencfl
