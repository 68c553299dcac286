#pragma once

#include <cstdint>
#include <vector>

#include "segerr/spatial.hpp"
#include "segerr/types.hpp"

namespace segerr {

/// Boundary pseudo-labels: flags[i] is true iff point i carries a real label
/// and some point j within the closed ball of radius r carries a different
/// real label. Ignore-labeled points are never boundary points and never make
/// a neighbor one. Data-parallel over points; output does not depend on the
/// worker count or on input order.
BoundaryMask compute_boundary_mask(const PointCloud& cloud,
                                   const LabelField& labels, double r,
                                   int workers = 0);

/// Same computation reusing an existing grid (requires r <= grid.cell_size()).
BoundaryMask compute_boundary_mask(const PointCloud& cloud,
                                   const LabelField& labels,
                                   const SpatialGrid& grid, double r,
                                   int workers = 0);

/// Quadratic reference implementation of the same contract; the benchmark
/// baseline and correctness gate.
BoundaryMask compute_boundary_mask_brute(const PointCloud& cloud,
                                         const LabelField& labels, double r,
                                         int workers = 0);

/// Two-sided strip of width r around the contour of a binary mask:
/// zone[i] = valid[i] && exists j with valid[j], mask[j] != mask[i], and
/// ||pos_j - pos_i|| <= r.
BoundaryMask binary_boundary_zone(const PointCloud& cloud,
                                  const std::vector<std::uint8_t>& mask,
                                  const std::vector<std::uint8_t>& valid,
                                  double r, int workers = 0);

BoundaryMask binary_boundary_zone(const PointCloud& cloud,
                                  const std::vector<std::uint8_t>& mask,
                                  const std::vector<std::uint8_t>& valid,
                                  const SpatialGrid& grid, double r,
                                  int workers = 0);

struct OverlapCounts {
  std::uint64_t count_a = 0;
  std::uint64_t count_b = 0;
  std::uint64_t count_both = 0;
};

/// Exact integer counts (|a|, |b|, |a AND b|) over point indices.
OverlapCounts boundary_overlap_counts(const BoundaryMask& a,
                                      const BoundaryMask& b);

}  // namespace segerr
