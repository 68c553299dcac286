#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "segerr/types.hpp"

namespace segerr {

enum class SceneKind { kTwoPlanes, kSpheresInBox, kCheckerboard, kRandomBlobs };

/// Declarative scene description. Labels of generated scenes are a pure
/// function of position (plus the seed for hash-based ignore injection), so
/// ground-truth boundaries are analytically characterizable and regeneration
/// is bitwise identical.
struct SceneSpec {
  SceneKind kind = SceneKind::kTwoPlanes;
  std::uint64_t seed = 1;

  // planar lattices (two-planes, checkerboard): extent meters, pitch meters
  std::array<double, 2> extent{1.0, 1.0};
  double pitch = 0.02;
  double split = 0.5;  // two-planes: points at x >= split get label 1
  double tile = 0.1;   // checkerboard: must be an integer multiple of pitch

  // uniform jitter in [-jitter, jitter] per axis, applied to lattice points
  // after labeling; labels stay a pure function of the lattice position
  double jitter = 0.0;

  // spheres-in-box: lattice over extents; two spheres of radius sphere_radius
  // centered at (0.25, 0.5, 0.5) and (0.75, 0.5, 0.5) of the extents, labeled
  // 1 and 2 over background 0. background=false keeps only sphere points.
  std::array<double, 3> extents{2.0, 0.6, 0.4};
  double sphere_radius = 0.1;
  bool background = true;

  // random-blobs: `count` uniform points labeled by the nearest of num_blobs
  // seeded sites (site k carries class k mod num_classes).
  std::uint64_t count = 5000;
  int num_blobs = 8;
  int num_classes = 5;

  // fraction of points whose ground-truth label is replaced by the ignore
  // sentinel, decided by a position hash
  double ignore_fraction = 0.0;
};

struct Scene {
  PointCloud cloud;
  LabelField labels;
};

/// Deterministic scene generation; throws ValidationError on bad parameters.
Scene generate_scene(const SceneSpec& spec);

enum class CorruptMode { kRegionSwap, kDilate, kErode, kMerge, kSpeckle };

CorruptMode parse_corrupt_mode(const std::string& name);
std::string corrupt_mode_name(CorruptMode mode);

/// Produces a synthetic prediction by injecting one error family into the
/// ground truth. magnitude is meters: the contour shift for dilate/erode, the
/// patch radius for speckle, and the component-adjacency radius for
/// region-swap and merge. The result assigns a real class to every point.
LabelField corrupt_labels(const LabelField& gt, const PointCloud& cloud,
                          CorruptMode mode, double magnitude,
                          std::uint64_t seed);

}  // namespace segerr
