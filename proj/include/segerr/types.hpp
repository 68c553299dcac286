#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segerr/errors.hpp"

namespace segerr {

using Vec3f = std::array<float, 3>;
using Rgb8 = std::array<std::uint8_t, 3>;

/// Point set over which every mask and label field is an index-aligned array.
/// Coordinates are meters. Optional attributes, when present, have length
/// count().
struct PointCloud {
  std::vector<Vec3f> positions;
  std::optional<std::vector<Rgb8>> colors;
  std::optional<std::vector<Vec3f>> normals;

  std::size_t count() const { return positions.size(); }
};

/// Per-point class assignment. ignore_label marks unannotated points; every
/// non-ignore label is a non-negative class id.
struct LabelField {
  std::vector<std::int32_t> labels;
  std::int32_t ignore_label = -1;

  std::size_t count() const { return labels.size(); }
  bool is_ignored(std::size_t i) const { return labels[i] == ignore_label; }
};

/// Per-point boolean flag; realizes boundary pseudo-labels and boundary zones.
struct BoundaryMask {
  std::vector<std::uint8_t> flags;

  std::size_t count() const { return flags.size(); }
  std::uint64_t count_true() const {
    std::uint64_t n = 0;
    for (const auto f : flags) n += f ? 1 : 0;
    return n;
  }
};

/// Which sample granularity the displacement error uses.
enum class DerrSamples { kClassMask, kComponent };

/// Evaluation protocol. iou_threshold is a fraction in (0,1); a published
/// subscript such as "50" reads as 0.50.
struct EvalConfig {
  double radius_m = 0.06;
  double iou_threshold = 0.5;
  int min_component_size = 50;
  int num_classes = 0;
  std::int32_t ignore_label = -1;
  DerrSamples derr_samples = DerrSamples::kClassMask;
};

/// Named, pairwise-disjoint sets of class ids (e.g. head/common/tail).
struct ClassGroups {
  std::map<std::string, std::vector<std::int32_t>> groups;

  bool empty() const { return groups.empty(); }
};

/// Non-owning view over a scene whose invariants validate_scene has checked.
struct SceneBundle {
  const PointCloud* cloud = nullptr;
  const LabelField* gt = nullptr;
  const LabelField* pred = nullptr;
  EvalConfig cfg;
};

/// Checks every cross-length and range invariant of a scene and returns a
/// bundle over the same storage. The prediction must assign a real class to
/// every point; ground truth may carry ignore labels.
SceneBundle validate_scene(const PointCloud& cloud, const LabelField& gt,
                           const LabelField& pred, const EvalConfig& cfg);

/// Validates config invariants alone (radius > 0, threshold in (0,1), ...).
void validate_config(const EvalConfig& cfg);

/// Checks group disjointness and id range against num_classes.
void validate_groups(const ClassGroups& groups, int num_classes);

}  // namespace segerr
