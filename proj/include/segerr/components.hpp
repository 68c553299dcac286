#pragma once

#include <cstdint>
#include <vector>

#include "segerr/spatial.hpp"
#include "segerr/types.hpp"

namespace segerr {

/// A maximal set of same-label points connected by hops of length <= r.
/// point_indices is sorted ascending and never empty.
struct Component {
  std::int32_t label = 0;
  std::vector<std::uint32_t> point_indices;

  std::size_t size() const { return point_indices.size(); }
};

/// Partitions all non-ignore points into connected components of the
/// radius-r same-label adjacency graph (union-find over grid-generated
/// candidate edges). Output is sorted by (label, smallest member index), so
/// the result is deterministic.
std::vector<Component> extract_components(const PointCloud& cloud,
                                          const LabelField& labels, double r);

std::vector<Component> extract_components(const PointCloud& cloud,
                                          const LabelField& labels,
                                          const SpatialGrid& grid, double r);

/// Most frequent predicted label among member points; ties break toward the
/// smallest class id.
std::int32_t plurality_predicted_label(const Component& component,
                                       const LabelField& pred);

}  // namespace segerr
