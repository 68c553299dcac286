#include "segerr/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "segerr/boundary.hpp"
#include "segerr/components.hpp"
#include "segerr/errors.hpp"
#include "segerr/rng.hpp"
#include "segerr/spatial.hpp"

namespace segerr {

namespace {

std::int64_t lattice_steps(double extent, double pitch) {
  return static_cast<std::int64_t>(std::floor(extent / pitch + 1e-9));
}

// First lattice column whose coordinate reaches `split`.
std::int64_t split_column(double split, double pitch) {
  return static_cast<std::int64_t>(std::ceil(split / pitch - 1e-9));
}

std::uint64_t position_hash(std::uint64_t seed, const Vec3f& p) {
  const std::uint64_t xy = static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(p[0])) |
                           (static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(p[1])) << 32);
  const std::uint64_t h = Rng::mix(seed, xy);
  return Rng::mix(h, std::bit_cast<std::uint32_t>(p[2]));
}

void apply_jitter(Scene& scene, const SceneSpec& spec) {
  if (spec.jitter == 0.0) return;
  if (!(spec.jitter > 0.0) || !std::isfinite(spec.jitter)) {
    throw ValidationError("jitter must be non-negative and finite");
  }
  Rng rng(spec.seed);
  for (auto& p : scene.cloud.positions) {
    p[0] = static_cast<float>(p[0] + rng.uniform(-spec.jitter, spec.jitter));
    p[1] = static_cast<float>(p[1] + rng.uniform(-spec.jitter, spec.jitter));
    p[2] = static_cast<float>(p[2] + rng.uniform(-spec.jitter, spec.jitter));
  }
}

void apply_ignore(Scene& scene, const SceneSpec& spec) {
  if (spec.ignore_fraction <= 0.0) return;
  for (std::size_t i = 0; i < scene.cloud.count(); ++i) {
    const double u = static_cast<double>(
                         position_hash(spec.seed, scene.cloud.positions[i]) >> 11) *
                     0x1.0p-53;
    if (u < spec.ignore_fraction) {
      scene.labels.labels[i] = scene.labels.ignore_label;
    }
  }
}

void check_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(what) + " must be positive and finite");
  }
}

Scene generate_two_planes(const SceneSpec& spec) {
  check_positive(spec.pitch, "pitch");
  check_positive(spec.extent[0], "extent");
  check_positive(spec.extent[1], "extent");
  const std::int64_t nx = lattice_steps(spec.extent[0], spec.pitch) + 1;
  const std::int64_t ny = lattice_steps(spec.extent[1], spec.pitch) + 1;
  const std::int64_t split_col = split_column(spec.split, spec.pitch);
  Scene scene;
  scene.cloud.positions.reserve(static_cast<std::size_t>(nx * ny));
  scene.labels.labels.reserve(static_cast<std::size_t>(nx * ny));
  for (std::int64_t iy = 0; iy < ny; ++iy) {
    for (std::int64_t ix = 0; ix < nx; ++ix) {
      scene.cloud.positions.push_back(Vec3f{static_cast<float>(ix * spec.pitch),
                                            static_cast<float>(iy * spec.pitch), 0.0f});
      scene.labels.labels.push_back(ix >= split_col ? 1 : 0);
    }
  }
  return scene;
}

Scene generate_checkerboard(const SceneSpec& spec) {
  check_positive(spec.pitch, "pitch");
  check_positive(spec.tile, "tile");
  const auto steps_per_tile = static_cast<std::int64_t>(std::llround(spec.tile / spec.pitch));
  if (steps_per_tile < 1 ||
      std::abs(spec.tile - static_cast<double>(steps_per_tile) * spec.pitch) > 1e-9) {
    throw ValidationError("tile must be an integer multiple of pitch");
  }
  const std::int64_t nx = lattice_steps(spec.extent[0], spec.pitch) + 1;
  const std::int64_t ny = lattice_steps(spec.extent[1], spec.pitch) + 1;
  Scene scene;
  scene.cloud.positions.reserve(static_cast<std::size_t>(nx * ny));
  scene.labels.labels.reserve(static_cast<std::size_t>(nx * ny));
  for (std::int64_t iy = 0; iy < ny; ++iy) {
    for (std::int64_t ix = 0; ix < nx; ++ix) {
      scene.cloud.positions.push_back(Vec3f{static_cast<float>(ix * spec.pitch),
                                            static_cast<float>(iy * spec.pitch), 0.0f});
      const std::int64_t parity = ((ix / steps_per_tile) + (iy / steps_per_tile)) & 1;
      scene.labels.labels.push_back(static_cast<std::int32_t>(parity));
    }
  }
  return scene;
}

Scene generate_spheres_in_box(const SceneSpec& spec) {
  check_positive(spec.pitch, "pitch");
  check_positive(spec.sphere_radius, "sphere_radius");
  for (const double e : spec.extents) check_positive(e, "extents");
  const std::array<double, 3> c1{0.25 * spec.extents[0], 0.5 * spec.extents[1],
                                 0.5 * spec.extents[2]};
  const std::array<double, 3> c2{0.75 * spec.extents[0], 0.5 * spec.extents[1],
                                 0.5 * spec.extents[2]};
  const double rad2 = spec.sphere_radius * spec.sphere_radius;
  const std::int64_t nx = lattice_steps(spec.extents[0], spec.pitch) + 1;
  const std::int64_t ny = lattice_steps(spec.extents[1], spec.pitch) + 1;
  const std::int64_t nz = lattice_steps(spec.extents[2], spec.pitch) + 1;
  Scene scene;
  for (std::int64_t iz = 0; iz < nz; ++iz) {
    for (std::int64_t iy = 0; iy < ny; ++iy) {
      for (std::int64_t ix = 0; ix < nx; ++ix) {
        const Vec3f p{static_cast<float>(ix * spec.pitch),
                      static_cast<float>(iy * spec.pitch),
                      static_cast<float>(iz * spec.pitch)};
        const auto dist2 = [&p](const std::array<double, 3>& c) {
          const double dx = static_cast<double>(p[0]) - c[0];
          const double dy = static_cast<double>(p[1]) - c[1];
          const double dz = static_cast<double>(p[2]) - c[2];
          return dx * dx + dy * dy + dz * dz;
        };
        std::int32_t label = 0;
        if (dist2(c1) <= rad2) {
          label = 1;
        } else if (dist2(c2) <= rad2) {
          label = 2;
        } else if (!spec.background) {
          continue;
        }
        scene.cloud.positions.push_back(p);
        scene.labels.labels.push_back(label);
      }
    }
  }
  if (scene.cloud.count() == 0) {
    throw ValidationError("spheres-in-box parameters produce no points");
  }
  return scene;
}

Scene generate_random_blobs(const SceneSpec& spec) {
  if (spec.count == 0) throw ValidationError("count must be positive");
  if (spec.num_blobs < 1) throw ValidationError("num_blobs must be positive");
  if (spec.num_classes < 1) throw ValidationError("num_classes must be positive");
  for (const double e : spec.extents) check_positive(e, "extents");

  Rng rng(spec.seed);
  std::vector<std::array<double, 3>> sites(static_cast<std::size_t>(spec.num_blobs));
  for (auto& s : sites) {
    s = {rng.uniform(0.0, spec.extents[0]), rng.uniform(0.0, spec.extents[1]),
         rng.uniform(0.0, spec.extents[2])};
  }

  Scene scene;
  scene.cloud.positions.reserve(spec.count);
  scene.labels.labels.reserve(spec.count);
  for (std::uint64_t i = 0; i < spec.count; ++i) {
    const Vec3f p{static_cast<float>(rng.uniform(0.0, spec.extents[0])),
                  static_cast<float>(rng.uniform(0.0, spec.extents[1])),
                  static_cast<float>(rng.uniform(0.0, spec.extents[2]))};
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const double dx = static_cast<double>(p[0]) - sites[k][0];
      const double dy = static_cast<double>(p[1]) - sites[k][1];
      const double dz = static_cast<double>(p[2]) - sites[k][2];
      const double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = k;
      }
    }
    scene.cloud.positions.push_back(p);
    scene.labels.labels.push_back(static_cast<std::int32_t>(best % spec.num_classes));
  }
  return scene;
}

std::int32_t derive_num_classes(const LabelField& labels) {
  std::int32_t max_label = -1;
  for (std::size_t i = 0; i < labels.count(); ++i) {
    if (!labels.is_ignored(i)) max_label = std::max(max_label, labels.labels[i]);
  }
  if (max_label < 0) throw ValidationError("label field has no annotated points");
  return max_label + 1;
}

// Nearest point with a different (non-ignore) label to any member of `comp`;
// grid-assisted within `magnitude`, full scan as fallback. Ties break toward
// the smallest point index.
std::uint32_t nearest_foreign_point(const PointCloud& cloud, const LabelField& gt,
                                    const Component& comp, double magnitude) {
  double best_d2 = std::numeric_limits<double>::infinity();
  std::uint32_t best = SpatialGrid::kNoCell;
  const SpatialGrid grid = build_grid(cloud, magnitude);
  for (const std::uint32_t i : comp.point_indices) {
    for (const std::uint32_t j : radius_neighbors(grid, cloud, i, magnitude)) {
      if (gt.is_ignored(j) || gt.labels[j] == comp.label) continue;
      const double d2 = squared_distance(cloud.positions[i], cloud.positions[j]);
      if (d2 < best_d2 || (d2 == best_d2 && j < best)) {
        best_d2 = d2;
        best = j;
      }
    }
  }
  if (best != SpatialGrid::kNoCell) return best;
  for (std::uint32_t j = 0; j < cloud.count(); ++j) {
    if (gt.is_ignored(j) || gt.labels[j] == comp.label) continue;
    for (const std::uint32_t i : comp.point_indices) {
      const double d2 = squared_distance(cloud.positions[i], cloud.positions[j]);
      if (d2 < best_d2 || (d2 == best_d2 && j < best)) {
        best_d2 = d2;
        best = j;
      }
    }
  }
  return best;
}

void corrupt_region_swap(const PointCloud& cloud, const LabelField& gt,
                         LabelField& pred, double magnitude, Rng& rng) {
  const auto comps = extract_components(cloud, gt, magnitude);
  const std::size_t a = rng.next_below(comps.size());
  std::vector<std::size_t> donors;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (comps[k].label != comps[a].label) donors.push_back(k);
  }
  if (donors.empty()) {
    throw ValidationError("region-swap needs components of at least two classes");
  }
  const std::size_t b = donors[rng.next_below(donors.size())];
  for (const std::uint32_t i : comps[a].point_indices) {
    pred.labels[i] = comps[b].label;
  }
}

void corrupt_merge(const PointCloud& cloud, const LabelField& gt, LabelField& pred,
                   double magnitude, Rng& rng) {
  const auto comps = extract_components(cloud, gt, magnitude);
  const std::size_t a = rng.next_below(comps.size());
  const std::uint32_t foreign = nearest_foreign_point(cloud, gt, comps[a], magnitude);
  if (foreign == SpatialGrid::kNoCell) {
    throw ValidationError("merge needs a second class in the scene");
  }
  const std::int32_t absorber = gt.labels[foreign];
  for (const std::uint32_t i : comps[a].point_indices) pred.labels[i] = absorber;
}

void corrupt_dilate(const PointCloud& cloud, const LabelField& gt, LabelField& pred,
                    double magnitude, Rng& rng, bool erode) {
  // pick the moving class deterministically among classes present
  std::vector<std::int32_t> present;
  {
    std::vector<bool> seen(static_cast<std::size_t>(derive_num_classes(gt)), false);
    for (std::size_t i = 0; i < gt.count(); ++i) {
      if (!gt.is_ignored(i)) seen[gt.labels[i]] = true;
    }
    for (std::size_t c = 0; c < seen.size(); ++c) {
      if (seen[c]) present.push_back(static_cast<std::int32_t>(c));
    }
  }
  if (present.size() < 2) {
    throw ValidationError("dilate/erode needs at least two classes present");
  }
  const std::int32_t moving = present[rng.next_below(present.size())];

  const SpatialGrid grid = build_grid(cloud, magnitude);
  const double r2 = magnitude * magnitude;
  for (std::uint32_t i = 0; i < cloud.count(); ++i) {
    if (gt.is_ignored(i)) continue;
    const bool inside = gt.labels[i] == moving;
    if (erode ? !inside : inside) continue;
    // dilate: outside points near the class join it
    // erode: inside points near the complement leave to the nearest foreign label
    double best_d2 = std::numeric_limits<double>::infinity();
    std::uint32_t best = SpatialGrid::kNoCell;
    const Vec3f& q = cloud.positions[i];
    const auto c = grid.cell_coords(q);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const std::uint32_t cell = grid.find_cell(c[0] + dx, c[1] + dy, c[2] + dz);
          if (cell == SpatialGrid::kNoCell) continue;
          const auto range = grid.range(cell);
          for (std::uint32_t k = range.begin; k < range.end; ++k) {
            const std::uint32_t j = grid.permutation()[k];
            if (j == i || gt.is_ignored(j)) continue;
            const bool j_inside = gt.labels[j] == moving;
            if (j_inside == inside) continue;
            const double d2 = squared_distance(q, cloud.positions[j]);
            if (d2 <= r2 && (d2 < best_d2 || (d2 == best_d2 && j < best))) {
              best_d2 = d2;
              best = j;
            }
          }
        }
      }
    }
    if (best == SpatialGrid::kNoCell) continue;
    pred.labels[i] = erode ? gt.labels[best] : moving;
  }
}

void corrupt_speckle(const PointCloud& cloud, const LabelField& gt, LabelField& pred,
                     double magnitude, Rng& rng) {
  const std::int32_t num_classes = derive_num_classes(gt);
  if (num_classes < 2) throw ValidationError("speckle needs at least two classes");

  // candidate centers sit well clear of true boundaries so the patches add
  // fresh contours instead of moving existing ones
  const BoundaryMask wide = compute_boundary_mask(cloud, gt, 3.0 * magnitude);
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t i = 0; i < cloud.count(); ++i) {
    if (!gt.is_ignored(i) && !wide.flags[i]) candidates.push_back(i);
  }
  if (candidates.empty()) {
    throw ValidationError("speckle found no interior points to corrupt");
  }
  const std::size_t patches =
      std::max<std::size_t>(1, std::min(candidates.size(), cloud.count() / 1500));
  const SpatialGrid grid = build_grid(cloud, magnitude);
  for (std::size_t p = 0; p < patches; ++p) {
    const std::size_t pick = rng.next_below(candidates.size());
    const std::uint32_t center = candidates[pick];
    candidates[pick] = candidates.back();
    candidates.pop_back();
    const std::int32_t wrong =
        static_cast<std::int32_t>((gt.labels[center] + 1 +
                                   static_cast<std::int32_t>(rng.next_below(
                                       static_cast<std::uint64_t>(num_classes - 1)))) %
                                  num_classes);
    pred.labels[center] = wrong;
    for (const std::uint32_t j : radius_neighbors(grid, cloud, center, magnitude)) {
      if (!gt.is_ignored(j)) pred.labels[j] = wrong;
    }
    if (candidates.empty()) break;
  }
}

void fill_unannotated(const PointCloud& cloud, const LabelField& gt,
                      LabelField& pred) {
  for (std::uint32_t i = 0; i < cloud.count(); ++i) {
    if (!gt.is_ignored(i)) continue;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::uint32_t best = SpatialGrid::kNoCell;
    for (std::uint32_t j = 0; j < cloud.count(); ++j) {
      if (gt.is_ignored(j)) continue;
      const double d2 = squared_distance(cloud.positions[i], cloud.positions[j]);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    pred.labels[i] = pred.labels[best];  // derive_num_classes guarantees one exists
  }
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  Scene scene;
  switch (spec.kind) {
    case SceneKind::kTwoPlanes:
      scene = generate_two_planes(spec);
      apply_jitter(scene, spec);
      break;
    case SceneKind::kCheckerboard:
      scene = generate_checkerboard(spec);
      apply_jitter(scene, spec);
      break;
    case SceneKind::kSpheresInBox:
      scene = generate_spheres_in_box(spec);
      apply_jitter(scene, spec);
      break;
    case SceneKind::kRandomBlobs:
      scene = generate_random_blobs(spec);
      break;
  }
  apply_ignore(scene, spec);
  return scene;
}

CorruptMode parse_corrupt_mode(const std::string& name) {
  if (name == "region-swap") return CorruptMode::kRegionSwap;
  if (name == "dilate") return CorruptMode::kDilate;
  if (name == "erode") return CorruptMode::kErode;
  if (name == "merge") return CorruptMode::kMerge;
  if (name == "speckle") return CorruptMode::kSpeckle;
  throw ValidationError("unknown corruption mode '" + name + "'");
}

std::string corrupt_mode_name(CorruptMode mode) {
  switch (mode) {
    case CorruptMode::kRegionSwap: return "region-swap";
    case CorruptMode::kDilate: return "dilate";
    case CorruptMode::kErode: return "erode";
    case CorruptMode::kMerge: return "merge";
    case CorruptMode::kSpeckle: return "speckle";
  }
  throw InternalError("unreachable corruption mode");
}

LabelField corrupt_labels(const LabelField& gt, const PointCloud& cloud,
                          CorruptMode mode, double magnitude, std::uint64_t seed) {
  if (gt.count() != cloud.count()) {
    throw ValidationError("label count does not match point count");
  }
  if (!(magnitude > 0.0) || !std::isfinite(magnitude)) {
    throw ValidationError("magnitude must be positive and finite");
  }
  if (cloud.count() == 0) throw ValidationError("cannot corrupt an empty scene");
  derive_num_classes(gt);  // rejects all-ignore fields

  Rng rng(seed);
  LabelField pred = gt;
  switch (mode) {
    case CorruptMode::kRegionSwap:
      corrupt_region_swap(cloud, gt, pred, magnitude, rng);
      break;
    case CorruptMode::kDilate:
      corrupt_dilate(cloud, gt, pred, magnitude, rng, /*erode=*/false);
      break;
    case CorruptMode::kErode:
      corrupt_dilate(cloud, gt, pred, magnitude, rng, /*erode=*/true);
      break;
    case CorruptMode::kMerge:
      corrupt_merge(cloud, gt, pred, magnitude, rng);
      break;
    case CorruptMode::kSpeckle:
      corrupt_speckle(cloud, gt, pred, magnitude, rng);
      break;
  }
  fill_unannotated(cloud, gt, pred);
  return pred;
}

}  // namespace segerr
