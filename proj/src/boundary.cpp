#include "segerr/boundary.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "segerr/errors.hpp"
#include "segerr/parallel.hpp"

namespace segerr {

namespace {

constexpr std::int32_t kExcluded = std::numeric_limits<std::int32_t>::min();

// Collapses a label field onto effective labels: excluded points become
// kExcluded, everything else keeps its (non-negative) class id.
std::vector<std::int32_t> effective_labels(const LabelField& labels) {
  std::vector<std::int32_t> eff(labels.count());
  for (std::size_t i = 0; i < eff.size(); ++i) {
    const std::int32_t label = labels.labels[i];
    if (label == labels.ignore_label) {
      eff[i] = kExcluded;
    } else if (label < 0) {
      throw ValidationError("non-ignore label " + std::to_string(label) +
                            " at index " + std::to_string(i) + " is negative");
    } else {
      eff[i] = label;
    }
  }
  return eff;
}

std::vector<std::int32_t> effective_mask(const std::vector<std::uint8_t>& mask,
                                         const std::vector<std::uint8_t>& valid) {
  std::vector<std::int32_t> eff(mask.size());
  for (std::size_t i = 0; i < eff.size(); ++i) {
    eff[i] = valid[i] ? (mask[i] ? 1 : 0) : kExcluded;
  }
  return eff;
}

// flags[i] = exists j with eff[j] >= 0, eff[j] != eff[i], dist(i,j) <= r.
// Cell-centric: every point in a cell shares the same 27-cell stencil, so the
// hash lookups happen once per cell. Per-cell label min/max aggregates let a
// whole cell whose neighborhood carries a single label skip every distance
// test.
BoundaryMask differing_label_scan(const PointCloud& cloud,
                                  const SpatialGrid& grid,
                                  const std::vector<std::int32_t>& eff,
                                  double r, int workers) {
  const std::size_t n = cloud.count();
  if (eff.size() != n) throw ValidationError("label count does not match point count");
  if (grid.point_count() != n) throw ValidationError("grid was built over a different point count");
  if (r > grid.cell_size()) {
    throw ValidationError("radius exceeds the grid cell size; the 27-cell stencil would miss neighbors");
  }

  const std::size_t cells = grid.occupied_cell_count();
  std::vector<std::int32_t> cell_min(cells, std::numeric_limits<std::int32_t>::max());
  std::vector<std::int32_t> cell_max(cells, std::numeric_limits<std::int32_t>::min());
  std::vector<std::int32_t> sorted_eff(n);
  const auto& perm = grid.permutation();
  for (std::size_t k = 0; k < n; ++k) {
    const std::int32_t label = eff[perm[k]];
    sorted_eff[k] = label;
    if (label == kExcluded) continue;
    const std::uint32_t c = grid.point_cell()[perm[k]];
    cell_min[c] = std::min(cell_min[c], label);
    cell_max[c] = std::max(cell_max[c], label);
  }

  BoundaryMask out;
  out.flags.assign(n, 0);
  const double r2 = r * r;
  const auto& px = grid.sorted_x();
  const auto& py = grid.sorted_y();
  const auto& pz = grid.sorted_z();

  parallel_for(cells, workers, [&](std::size_t begin, std::size_t end) {
    std::array<std::uint32_t, 27> stencil;
    for (std::size_t c = begin; c < end; ++c) {
      const auto coords = SpatialGrid::unpack_key(grid.cell_keys()[c]);
      int count = 0;
      std::int32_t hood_min = std::numeric_limits<std::int32_t>::max();
      std::int32_t hood_max = std::numeric_limits<std::int32_t>::min();
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          for (std::int64_t dz = -1; dz <= 1; ++dz) {
            const std::uint32_t cell =
                grid.find_cell(coords[0] + dx, coords[1] + dy, coords[2] + dz);
            if (cell == SpatialGrid::kNoCell || cell_min[cell] > cell_max[cell]) {
              continue;
            }
            stencil[count++] = cell;
            hood_min = std::min(hood_min, cell_min[cell]);
            hood_max = std::max(hood_max, cell_max[cell]);
          }
        }
      }
      if (hood_min >= hood_max) continue;  // one label (or none) in reach

      const auto range_c = grid.range(static_cast<std::uint32_t>(c));
      for (std::uint32_t k = range_c.begin; k < range_c.end; ++k) {
        const std::int32_t mine = sorted_eff[k];
        if (mine == kExcluded) continue;
        const double qx = px[k], qy = py[k], qz = pz[k];
        bool found = false;
        for (int s = 0; s < count && !found; ++s) {
          const std::uint32_t cell = stencil[s];
          if (cell_min[cell] == mine && cell_max[cell] == mine) continue;
          const auto range = grid.range(cell);
          for (std::uint32_t m = range.begin; m < range.end; ++m) {
            const std::int32_t other = sorted_eff[m];
            if (other == kExcluded || other == mine) continue;
            const double ddx = qx - static_cast<double>(px[m]);
            const double ddy = qy - static_cast<double>(py[m]);
            const double ddz = qz - static_cast<double>(pz[m]);
            if (ddx * ddx + ddy * ddy + ddz * ddz <= r2) {
              found = true;
              break;
            }
          }
        }
        out.flags[perm[k]] = found ? 1 : 0;
      }
    }
  });
  return out;
}

// Quadratic scan in structure-of-arrays doubles. Labels are carried as
// doubles too so the whole inner loop runs in one lane width and vectorizes.
BoundaryMask differing_label_scan_brute(const PointCloud& cloud,
                                        const std::vector<std::int32_t>& eff,
                                        double r, int workers) {
  const std::size_t n = cloud.count();
  if (eff.size() != n) throw ValidationError("label count does not match point count");

  std::vector<double> xs(n), ys(n), zs(n), labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = cloud.positions[i][0];
    ys[i] = cloud.positions[i][1];
    zs[i] = cloud.positions[i][2];
    labels[i] = static_cast<double>(eff[i]);
  }
  const double excluded = static_cast<double>(kExcluded);

  BoundaryMask out;
  out.flags.assign(n, 0);
  const double r2 = r * r;
  constexpr std::size_t kBlock = 1024;

  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (eff[i] == kExcluded) continue;
      const double mine = labels[i];
      const double qx = xs[i], qy = ys[i], qz = zs[i];
      bool found = false;
      for (std::size_t b = 0; b < n && !found; b += kBlock) {
        const std::size_t hi = std::min(n, b + kBlock);
        double hits = 0.0;
        for (std::size_t j = b; j < hi; ++j) {
          const double dx = qx - xs[j];
          const double dy = qy - ys[j];
          const double dz = qz - zs[j];
          const bool differs = labels[j] != mine && labels[j] != excluded;
          hits += (differs && (dx * dx + dy * dy + dz * dz <= r2)) ? 1.0 : 0.0;
        }
        found = hits != 0.0;
      }
      out.flags[i] = found ? 1 : 0;
    }
  });
  return out;
}

}  // namespace

BoundaryMask compute_boundary_mask(const PointCloud& cloud,
                                   const LabelField& labels, double r,
                                   int workers) {
  if (labels.count() != cloud.count()) {
    throw ValidationError("label count does not match point count");
  }
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  if (cloud.count() == 0) return BoundaryMask{};
  const SpatialGrid grid = build_grid(cloud, r);
  return differing_label_scan(cloud, grid, effective_labels(labels), r, workers);
}

BoundaryMask compute_boundary_mask(const PointCloud& cloud,
                                   const LabelField& labels,
                                   const SpatialGrid& grid, double r,
                                   int workers) {
  if (labels.count() != cloud.count()) {
    throw ValidationError("label count does not match point count");
  }
  return differing_label_scan(cloud, grid, effective_labels(labels), r, workers);
}

BoundaryMask compute_boundary_mask_brute(const PointCloud& cloud,
                                         const LabelField& labels, double r,
                                         int workers) {
  if (labels.count() != cloud.count()) {
    throw ValidationError("label count does not match point count");
  }
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  return differing_label_scan_brute(cloud, effective_labels(labels), r, workers);
}

BoundaryMask binary_boundary_zone(const PointCloud& cloud,
                                  const std::vector<std::uint8_t>& mask,
                                  const std::vector<std::uint8_t>& valid,
                                  double r, int workers) {
  if (mask.size() != cloud.count() || valid.size() != cloud.count()) {
    throw ValidationError("mask/valid length does not match point count");
  }
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  if (cloud.count() == 0) return BoundaryMask{};
  const SpatialGrid grid = build_grid(cloud, r);
  return differing_label_scan(cloud, grid, effective_mask(mask, valid), r, workers);
}

BoundaryMask binary_boundary_zone(const PointCloud& cloud,
                                  const std::vector<std::uint8_t>& mask,
                                  const std::vector<std::uint8_t>& valid,
                                  const SpatialGrid& grid, double r,
                                  int workers) {
  if (mask.size() != cloud.count() || valid.size() != cloud.count()) {
    throw ValidationError("mask/valid length does not match point count");
  }
  return differing_label_scan(cloud, grid, effective_mask(mask, valid), r, workers);
}

OverlapCounts boundary_overlap_counts(const BoundaryMask& a,
                                      const BoundaryMask& b) {
  if (a.count() != b.count()) {
    throw ValidationError("boundary masks have different lengths");
  }
  OverlapCounts counts;
  for (std::size_t i = 0; i < a.count(); ++i) {
    counts.count_a += a.flags[i] ? 1 : 0;
    counts.count_b += b.flags[i] ? 1 : 0;
    counts.count_both += (a.flags[i] && b.flags[i]) ? 1 : 0;
  }
  return counts;
}

}  // namespace segerr
