#include "segerr/components.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "segerr/errors.hpp"

namespace segerr {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::uint32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace

std::vector<Component> extract_components(const PointCloud& cloud,
                                          const LabelField& labels, double r) {
  if (labels.count() != cloud.count()) {
    throw ValidationError("label count does not match point count");
  }
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  if (cloud.count() == 0) return {};
  const SpatialGrid grid = build_grid(cloud, r);
  return extract_components(cloud, labels, grid, r);
}

std::vector<Component> extract_components(const PointCloud& cloud,
                                          const LabelField& labels,
                                          const SpatialGrid& grid, double r) {
  const std::size_t n = cloud.count();
  if (labels.count() != n) {
    throw ValidationError("label count does not match point count");
  }
  if (grid.point_count() != n) {
    throw ValidationError("grid was built over a different point count");
  }
  if (r > grid.cell_size()) {
    throw ValidationError("radius exceeds the grid cell size; the 27-cell stencil would miss neighbors");
  }

  UnionFind uf(n);
  const double r2 = r * r;
  const auto& perm = grid.permutation();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (labels.is_ignored(i)) continue;
    const std::int32_t label = labels.labels[i];
    const Vec3f& q = cloud.positions[i];
    const auto c = grid.cell_coords(q);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const std::uint32_t cell = grid.find_cell(c[0] + dx, c[1] + dy, c[2] + dz);
          if (cell == SpatialGrid::kNoCell) continue;
          const auto range = grid.range(cell);
          for (std::uint32_t k = range.begin; k < range.end; ++k) {
            const std::uint32_t j = perm[k];
            if (j <= i) continue;  // each unordered pair once
            if (labels.labels[j] != label) continue;
            if (squared_distance(q, cloud.positions[j]) <= r2) uf.unite(i, j);
          }
        }
      }
    }
  }

  // Ascending member order falls out of the index scan; bucket by root.
  std::vector<std::uint32_t> root_to_slot(n, SpatialGrid::kNoCell);
  std::vector<Component> components;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (labels.is_ignored(i)) continue;
    const std::uint32_t root = uf.find(i);
    if (root_to_slot[root] == SpatialGrid::kNoCell) {
      root_to_slot[root] = static_cast<std::uint32_t>(components.size());
      components.push_back(Component{labels.labels[i], {}});
    }
    components[root_to_slot[root]].point_indices.push_back(i);
  }

  std::sort(components.begin(), components.end(),
            [](const Component& a, const Component& b) {
              if (a.label != b.label) return a.label < b.label;
              return a.point_indices.front() < b.point_indices.front();
            });
  return components;
}

std::int32_t plurality_predicted_label(const Component& component,
                                       const LabelField& pred) {
  if (component.point_indices.empty()) {
    throw ValidationError("component has no members");
  }
  std::map<std::int32_t, std::size_t> histogram;
  for (const std::uint32_t i : component.point_indices) {
    if (i >= pred.count()) throw ValidationError("component index out of range");
    ++histogram[pred.labels[i]];
  }
  std::int32_t best = 0;
  std::size_t best_count = 0;
  for (const auto& [label, count] : histogram) {  // ascending label order
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

}  // namespace segerr
