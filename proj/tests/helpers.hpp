#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "segerr/synth.hpp"
#include "segerr/types.hpp"

namespace testutil {

inline segerr::PointCloud make_cloud(std::vector<segerr::Vec3f> positions) {
  segerr::PointCloud cloud;
  cloud.positions = std::move(positions);
  return cloud;
}

inline segerr::LabelField make_labels(std::vector<std::int32_t> labels,
                                      std::int32_t ignore = -1) {
  segerr::LabelField field;
  field.labels = std::move(labels);
  field.ignore_label = ignore;
  return field;
}

// Colinear chain on the x axis at the given pitch.
inline segerr::PointCloud make_chain(std::size_t count, double pitch) {
  std::vector<segerr::Vec3f> positions;
  positions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    positions.push_back({static_cast<float>(i * pitch), 0.0f, 0.0f});
  }
  return make_cloud(std::move(positions));
}

inline segerr::Scene random_blobs(std::uint64_t count, std::uint64_t seed,
                                  int num_classes = 4, int num_blobs = 8,
                                  double extent = 0.6) {
  segerr::SceneSpec spec;
  spec.kind = segerr::SceneKind::kRandomBlobs;
  spec.count = count;
  spec.extents = {extent, extent, extent};
  spec.num_blobs = num_blobs;
  spec.num_classes = num_classes;
  spec.seed = seed;
  return segerr::generate_scene(spec);
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    dir_ = std::filesystem::temp_directory_path() /
           ("segerr_test_" + std::to_string(rd()) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  std::filesystem::path dir_;
};

}  // namespace testutil
