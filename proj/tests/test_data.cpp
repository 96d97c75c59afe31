#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "gencfl/data.hpp"
#include "test_helpers.hpp"

using namespace gencfl;
namespace fs = std::filesystem;

namespace {

struct IdxFixture {
  fs::path dir;
  fs::path images;
  fs::path labels;

  IdxFixture() {
    dir = test::fresh_temp_dir("idx");
    images = dir / "imgs-idx3-ubyte";
    labels = dir / "labs-idx1-ubyte";
  }
};

}  // namespace

TEST_CASE("load_idx reads a hand-built two-image file") {
  IdxFixture fx;
  // 2x2 images: first all zeros, second all 0xFF.
  test::write_idx_images(fx.images, {{0, 0, 0, 0}, {255, 255, 255, 255}}, 2, 2);
  test::write_idx_labels(fx.labels, {0, 1});

  const Dataset ds = load_idx(fx.images.string(), fx.labels.string());
  CHECK(ds.n() == 2);
  CHECK(ds.dim() == 4);
  CHECK(ds.classes == 2);
  for (int d = 0; d < 4; ++d) {
    CHECK(ds.images(0, d) == 0.0);
    CHECK(ds.images(1, d) == 1.0);
  }
  CHECK(ds.labels == std::vector<int>{0, 1});
}

TEST_CASE("load_idx error cases are distinct") {
  IdxFixture fx;
  test::write_idx_images(fx.images, {{1, 2, 3, 4}}, 2, 2);
  test::write_idx_labels(fx.labels, {1});

  SUBCASE("missing file") {
    try {
      load_idx((fx.dir / "nope").string(), fx.labels.string());
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::Io);
    }
  }
  SUBCASE("bad image magic") {
    test::write_idx_images(fx.images, {{1, 2, 3, 4}}, 2, 2, /*magic=*/0x00000801);
    try {
      load_idx(fx.images.string(), fx.labels.string());
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::BadMagic);
    }
  }
  SUBCASE("bad label magic") {
    test::write_idx_labels(fx.labels, {1}, /*magic=*/0x00000803);
    try {
      load_idx(fx.images.string(), fx.labels.string());
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::BadMagic);
    }
  }
  SUBCASE("truncated payload") {
    // header claims 2 images but only one follows
    std::ofstream out(fx.images, std::ios::binary);
    test::write_u32_be(out, 0x00000803);
    test::write_u32_be(out, 2);
    test::write_u32_be(out, 2);
    test::write_u32_be(out, 2);
    const unsigned char img[4] = {9, 9, 9, 9};
    out.write(reinterpret_cast<const char*>(img), 4);
    out.close();
    try {
      load_idx(fx.images.string(), fx.labels.string());
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::Truncated);
    }
  }
  SUBCASE("image/label count mismatch") {
    test::write_idx_labels(fx.labels, {1, 0});
    try {
      load_idx(fx.images.string(), fx.labels.string());
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataError::Kind::CountMismatch);
    }
  }
}

TEST_CASE("partition sizes are exact when min == max") {
  const Dataset ds = test::make_blobs(10, 100, 8, 1);
  const auto plan = partition_non_iid(ds, 10, {100, 100, 0.5, false}, 7);
  CHECK(plan.shards.size() == 10);
  for (const auto& shard : plan.shards) CHECK(shard.size() == 100);
}

TEST_CASE("partition is deterministic per seed") {
  const Dataset ds = test::make_blobs(10, 50, 8, 2);
  const auto a = partition_non_iid(ds, 7, {10, 60, 0.5, false}, 99);
  const auto b = partition_non_iid(ds, 7, {10, 60, 0.5, false}, 99);
  const auto c = partition_non_iid(ds, 7, {10, 60, 0.5, false}, 100);
  CHECK(a.shards == b.shards);
  CHECK(a.shards != c.shards);
}

TEST_CASE("maximal skew restricts shards to at most two classes") {
  const Dataset ds = test::make_blobs(10, 200, 4, 3);
  const auto plan = partition_non_iid(ds, 10, {50, 150, 1.0, false}, 5);
  for (const auto& shard : plan.shards) {
    std::set<int> classes;
    for (int idx : shard) classes.insert(ds.labels[static_cast<std::size_t>(idx)]);
    CHECK(classes.size() <= 2);
  }
}

TEST_CASE("shard indices are valid and unique within a shard") {
  const Dataset ds = test::make_blobs(6, 80, 4, 4);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const double skew = rng.uniform();
    const auto plan = partition_non_iid(
        ds, 5, {20, 100, skew, false}, rng.next());
    for (const auto& shard : plan.shards) {
      std::set<int> seen;
      for (int idx : shard) {
        CHECK(idx >= 0);
        CHECK(idx < ds.n());
        CHECK(seen.insert(idx).second);  // no duplicates
      }
    }
  }
}

TEST_CASE("zero skew matches the global label distribution (chi-square)") {
  const Dataset ds = test::make_blobs(10, 2000, 3, 6);
  const auto plan = partition_non_iid(ds, 2, {5000, 5000, 0.0, false}, 11);
  for (const auto& shard : plan.shards) {
    std::vector<int> counts(10, 0);
    for (int idx : shard) counts[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(idx)])]++;
    const double expected = 5000.0 / 10.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 9 degrees of freedom, p ~ 0.001
    CHECK(chi2 < 27.88);
  }
}

TEST_CASE("disjoint mode never reuses an index") {
  const Dataset ds = test::make_blobs(5, 100, 4, 7);
  const auto plan = partition_non_iid(ds, 4, {50, 100, 0.7, true}, 13);
  std::set<int> seen;
  for (const auto& shard : plan.shards) {
    for (int idx : shard) CHECK(seen.insert(idx).second);
  }

  // and it reports exhaustion rather than recycling
  CHECK_THROWS_AS(partition_non_iid(ds, 20, {400, 500, 0.7, true}, 13),
                  std::invalid_argument);
}

TEST_CASE("partition rejects bad bounds") {
  const Dataset ds = test::make_blobs(3, 10, 4, 9);
  CHECK_THROWS_AS(partition_non_iid(ds, 0, {1, 5, 0.5, false}, 1), std::invalid_argument);
  CHECK_THROWS_AS(partition_non_iid(ds, 2, {0, 5, 0.5, false}, 1), std::invalid_argument);
  CHECK_THROWS_AS(partition_non_iid(ds, 2, {6, 5, 0.5, false}, 1), std::invalid_argument);
  CHECK_THROWS_AS(partition_non_iid(ds, 2, {1, 31, 0.5, false}, 1), std::invalid_argument);
  CHECK_THROWS_AS(partition_non_iid(ds, 2, {1, 5, 1.5, false}, 1), std::invalid_argument);
}
