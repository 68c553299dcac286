#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "segerr/types.hpp"

namespace segerr {

/// Squared Euclidean distance, evaluated in double in a fixed operation order.
/// Every neighbor predicate in the library uses this one function so that the
/// grid path and the brute-force path agree bit for bit.
inline double squared_distance(const Vec3f& a, const Vec3f& b) {
  const double dx = static_cast<double>(a[0]) - static_cast<double>(b[0]);
  const double dy = static_cast<double>(a[1]) - static_cast<double>(b[1]);
  const double dz = static_cast<double>(a[2]) - static_cast<double>(b[2]);
  return dx * dx + dy * dy + dz * dz;
}

/// Uniform-cell acceleration structure for closed-ball radius queries with
/// r <= cell_size. Points are stored as a cell-grouped permutation with
/// structure-of-arrays coordinates for sequential scans. Immutable after
/// build; safe for unlimited concurrent queries.
class SpatialGrid {
 public:
  struct CellRange {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    bool operator==(const CellRange&) const = default;
  };

  double cell_size() const { return cell_size_; }
  const std::array<double, 3>& origin() const { return origin_; }
  std::size_t point_count() const { return permutation_.size(); }
  std::size_t occupied_cell_count() const { return ranges_.size(); }

  const std::vector<std::uint32_t>& permutation() const { return permutation_; }
  const std::vector<std::uint32_t>& point_cell() const { return point_cell_; }
  const std::vector<std::uint64_t>& cell_keys() const { return cell_keys_; }
  CellRange range(std::uint32_t cell_id) const { return ranges_[cell_id]; }

  const std::vector<float>& sorted_x() const { return px_; }
  const std::vector<float>& sorted_y() const { return py_; }
  const std::vector<float>& sorted_z() const { return pz_; }

  /// Cell coordinates of a point position (floor((p - origin) / cell_size)).
  std::array<std::int64_t, 3> cell_coords(const Vec3f& p) const;

  /// Dense cell id for packed coordinates, or kNoCell when unoccupied.
  std::uint32_t find_cell(std::int64_t cx, std::int64_t cy, std::int64_t cz) const;

  static constexpr std::uint32_t kNoCell = 0xFFFFFFFFu;
  static std::uint64_t pack_key(std::int64_t cx, std::int64_t cy, std::int64_t cz);
  static std::array<std::int64_t, 3> unpack_key(std::uint64_t key);

  bool operator==(const SpatialGrid& other) const = default;

 private:
  friend SpatialGrid build_grid(const PointCloud& cloud, double cell_size);

  double cell_size_ = 0.0;
  std::array<double, 3> origin_{0.0, 0.0, 0.0};
  std::unordered_map<std::uint64_t, std::uint32_t> cell_index_;  // key -> dense id
  std::vector<std::uint64_t> cell_keys_;                         // per dense id
  std::vector<CellRange> ranges_;                                // per dense id
  std::vector<std::uint32_t> permutation_;  // point indices grouped by cell
  std::vector<std::uint32_t> point_cell_;   // original index -> dense cell id
  std::vector<float> px_, py_, pz_;         // permuted coordinates
};

/// Builds the grid with a counting sort by cell, stable within each cell, so
/// construction is a pure function of the input order.
SpatialGrid build_grid(const PointCloud& cloud, double cell_size);

/// Exact closed-ball neighbors {j != query : ||pos_j - pos_query|| <= r} via
/// the 27-cell stencil. Requires r <= grid.cell_size(); larger radii are an
/// error rather than a silent miss. Result is sorted ascending.
std::vector<std::uint32_t> radius_neighbors(const SpatialGrid& grid,
                                            const PointCloud& cloud,
                                            std::uint32_t query_index, double r);

/// Quadratic full-scan reference for the same closed-ball query.
std::vector<std::uint32_t> brute_force_neighbors(const PointCloud& cloud,
                                                 std::uint32_t query_index,
                                                 double r);

}  // namespace segerr
