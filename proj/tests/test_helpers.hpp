#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gencfl/data.hpp"
#include "gencfl/rng.hpp"

namespace gencfl::test {

// Well-separated Gaussian blobs, one per class; easy enough that a few SGD
// epochs visibly reduce the loss.
inline Dataset make_blobs(int classes, int per_class, int dim, std::uint64_t seed,
                          double spread = 0.15) {
  Dataset ds;
  ds.classes = classes;
  const int n = classes * per_class;
  ds.images.resize(n, dim);
  ds.labels.resize(static_cast<std::size_t>(n));
  Rng rng(seed);

  std::vector<std::vector<double>> centers(static_cast<std::size_t>(classes));
  for (auto& c : centers) {
    c.resize(static_cast<std::size_t>(dim));
    for (auto& v : c) v = rng.uniform();
  }
  int row = 0;
  for (int cls = 0; cls < classes; ++cls) {
    for (int i = 0; i < per_class; ++i, ++row) {
      for (int d = 0; d < dim; ++d) {
        double v = centers[static_cast<std::size_t>(cls)][static_cast<std::size_t>(d)] +
                   spread * rng.normal();
        ds.images(row, d) = std::clamp(v, 0.0, 1.0);
      }
      ds.labels[static_cast<std::size_t>(row)] = cls;
    }
  }
  return ds;
}

inline void write_u32_be(std::ofstream& out, std::uint32_t v) {
  const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

inline void write_idx_images(const std::filesystem::path& path,
                             const std::vector<std::vector<unsigned char>>& images, int rows,
                             int cols, std::uint32_t magic = 0x00000803) {
  std::ofstream out(path, std::ios::binary);
  write_u32_be(out, magic);
  write_u32_be(out, static_cast<std::uint32_t>(images.size()));
  write_u32_be(out, static_cast<std::uint32_t>(rows));
  write_u32_be(out, static_cast<std::uint32_t>(cols));
  for (const auto& img : images) {
    out.write(reinterpret_cast<const char*>(img.data()),
              static_cast<std::streamsize>(img.size()));
  }
}

inline void write_idx_labels(const std::filesystem::path& path,
                             const std::vector<unsigned char>& labels,
                             std::uint32_t magic = 0x00000801) {
  std::ofstream out(path, std::ios::binary);
  write_u32_be(out, magic);
  write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

// Writes a blob dataset as an IDX pair; pixel = round(v * 255).
inline void write_dataset_idx(const Dataset& ds, const std::filesystem::path& images_path,
                              const std::filesystem::path& labels_path, int rows, int cols) {
  std::vector<std::vector<unsigned char>> images;
  images.reserve(static_cast<std::size_t>(ds.n()));
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    std::vector<unsigned char> img(static_cast<std::size_t>(ds.dim()));
    for (Eigen::Index d = 0; d < ds.dim(); ++d) {
      img[static_cast<std::size_t>(d)] =
          static_cast<unsigned char>(std::lround(ds.images(i, d) * 255.0));
    }
    images.push_back(std::move(img));
  }
  std::vector<unsigned char> labels(ds.labels.begin(), ds.labels.end());
  write_idx_images(images_path, images, rows, cols);
  write_idx_labels(labels_path, labels);
}

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("gencfl_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gencfl::test
