#include "segerr/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "segerr/errors.hpp"

namespace segerr {

namespace {

// 21 bits per axis; cell coordinates are shifted to be non-negative.
constexpr std::int64_t kMaxCellCoord = (std::int64_t{1} << 21) - 1;

}  // namespace

std::uint64_t SpatialGrid::pack_key(std::int64_t cx, std::int64_t cy,
                                    std::int64_t cz) {
  return (static_cast<std::uint64_t>(cx) << 42) |
         (static_cast<std::uint64_t>(cy) << 21) | static_cast<std::uint64_t>(cz);
}

std::array<std::int64_t, 3> SpatialGrid::unpack_key(std::uint64_t key) {
  constexpr std::uint64_t mask = (std::uint64_t{1} << 21) - 1;
  return {static_cast<std::int64_t>(key >> 42),
          static_cast<std::int64_t>((key >> 21) & mask),
          static_cast<std::int64_t>(key & mask)};
}

std::array<std::int64_t, 3> SpatialGrid::cell_coords(const Vec3f& p) const {
  return {static_cast<std::int64_t>(
              std::floor((static_cast<double>(p[0]) - origin_[0]) / cell_size_)),
          static_cast<std::int64_t>(
              std::floor((static_cast<double>(p[1]) - origin_[1]) / cell_size_)),
          static_cast<std::int64_t>(
              std::floor((static_cast<double>(p[2]) - origin_[2]) / cell_size_))};
}

std::uint32_t SpatialGrid::find_cell(std::int64_t cx, std::int64_t cy,
                                     std::int64_t cz) const {
  if (cx < 0 || cy < 0 || cz < 0 || cx > kMaxCellCoord || cy > kMaxCellCoord ||
      cz > kMaxCellCoord) {
    return kNoCell;
  }
  const auto it = cell_index_.find(pack_key(cx, cy, cz));
  return it == cell_index_.end() ? kNoCell : it->second;
}

SpatialGrid build_grid(const PointCloud& cloud, double cell_size) {
  const std::size_t n = cloud.count();
  if (n == 0) throw ValidationError("cannot build a grid over an empty cloud");
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ValidationError("cell_size must be positive and finite");
  }

  SpatialGrid grid;
  grid.cell_size_ = cell_size;
  grid.origin_ = {std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  for (const Vec3f& p : cloud.positions) {
    grid.origin_[0] = std::min(grid.origin_[0], static_cast<double>(p[0]));
    grid.origin_[1] = std::min(grid.origin_[1], static_cast<double>(p[1]));
    grid.origin_[2] = std::min(grid.origin_[2], static_cast<double>(p[2]));
  }

  // Pass 1: assign dense cell ids in first-encounter order and count members.
  grid.point_cell_.resize(n);
  grid.cell_index_.reserve(n);
  std::vector<std::uint32_t> occupancy;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = grid.cell_coords(cloud.positions[i]);
    if (c[0] > kMaxCellCoord || c[1] > kMaxCellCoord || c[2] > kMaxCellCoord ||
        c[0] < 0 || c[1] < 0 || c[2] < 0) {
      throw ValidationError("point " + std::to_string(i) +
                            " exceeds the grid's 2^21-cells-per-axis extent");
    }
    const std::uint64_t key = SpatialGrid::pack_key(c[0], c[1], c[2]);
    auto [it, inserted] = grid.cell_index_.try_emplace(
        key, static_cast<std::uint32_t>(grid.cell_keys_.size()));
    if (inserted) {
      grid.cell_keys_.push_back(key);
      occupancy.push_back(0);
    }
    grid.point_cell_[i] = it->second;
    ++occupancy[it->second];
  }

  // Pass 2: counting sort, stable within each cell.
  const std::size_t cells = grid.cell_keys_.size();
  grid.ranges_.resize(cells);
  std::uint32_t offset = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    grid.ranges_[c].begin = offset;
    offset += occupancy[c];
    grid.ranges_[c].end = offset;
  }
  grid.permutation_.resize(n);
  std::vector<std::uint32_t> cursor(cells, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t c = grid.point_cell_[i];
    grid.permutation_[grid.ranges_[c].begin + cursor[c]++] =
        static_cast<std::uint32_t>(i);
  }

  grid.px_.resize(n);
  grid.py_.resize(n);
  grid.pz_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3f& p = cloud.positions[grid.permutation_[k]];
    grid.px_[k] = p[0];
    grid.py_[k] = p[1];
    grid.pz_[k] = p[2];
  }
  return grid;
}

std::vector<std::uint32_t> radius_neighbors(const SpatialGrid& grid,
                                            const PointCloud& cloud,
                                            std::uint32_t query_index,
                                            double r) {
  if (query_index >= cloud.count()) {
    throw ValidationError("query index out of range");
  }
  if (cloud.count() != grid.point_count()) {
    throw ValidationError("grid was built over a different point count");
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw ValidationError("radius must be positive and finite");
  }
  if (r > grid.cell_size()) {
    throw ValidationError("radius exceeds the grid cell size; the 27-cell stencil would miss neighbors");
  }

  const Vec3f& q = cloud.positions[query_index];
  const double r2 = r * r;
  const auto c = grid.cell_coords(q);
  std::vector<std::uint32_t> out;
  for (std::int64_t dx = -1; dx <= 1; ++dx) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dz = -1; dz <= 1; ++dz) {
        const std::uint32_t cell = grid.find_cell(c[0] + dx, c[1] + dy, c[2] + dz);
        if (cell == SpatialGrid::kNoCell) continue;
        const auto range = grid.range(cell);
        for (std::uint32_t k = range.begin; k < range.end; ++k) {
          const std::uint32_t j = grid.permutation()[k];
          if (j == query_index) continue;
          if (squared_distance(q, cloud.positions[j]) <= r2) out.push_back(j);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint32_t> brute_force_neighbors(const PointCloud& cloud,
                                                 std::uint32_t query_index,
                                                 double r) {
  if (query_index >= cloud.count()) {
    throw ValidationError("query index out of range");
  }
  const Vec3f& q = cloud.positions[query_index];
  const double r2 = r * r;
  std::vector<std::uint32_t> out;
  for (std::uint32_t j = 0; j < cloud.count(); ++j) {
    if (j == query_index) continue;
    if (squared_distance(q, cloud.positions[j]) <= r2) out.push_back(j);
  }
  return out;
}

}  // namespace segerr
