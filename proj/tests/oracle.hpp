#pragma once

// Independent reference implementations used only by tests: full quadratic
// scans, breadth-first search over the naive adjacency graph, and explicit
// std::set algebra. Nothing here touches the grid, union-find, or Eigen paths
// under test.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "segerr/metrics.hpp"
#include "segerr/types.hpp"

namespace oracle {

double dist2(const segerr::Vec3f& a, const segerr::Vec3f& b);

std::vector<std::uint32_t> neighbors(const segerr::PointCloud& cloud,
                                     std::uint32_t query, double r);

segerr::BoundaryMask boundary_mask(const segerr::PointCloud& cloud,
                                   const segerr::LabelField& labels, double r);

segerr::BoundaryMask boundary_zone(const segerr::PointCloud& cloud,
                                   const std::vector<std::uint8_t>& mask,
                                   const std::vector<std::uint8_t>& valid,
                                   double r);

// Connected components via BFS; each component is a sorted index set.
std::vector<std::set<std::uint32_t>> components_bfs(
    const segerr::PointCloud& cloud, const segerr::LabelField& labels, double r);

// Full naive recomputation of every MetricsReport counter and metric.
segerr::MetricsReport evaluate(const segerr::PointCloud& cloud,
                               const segerr::LabelField& gt,
                               const segerr::LabelField& pred,
                               const segerr::EvalConfig& cfg,
                               const segerr::ClassGroups& groups = {});

// Scalar-loop loss and attention references.
double dice(const std::vector<std::vector<double>>& pred,
            const std::vector<std::vector<double>>& target);
double semantic_loss(const std::vector<std::vector<double>>& pred,
                     const std::vector<std::vector<double>>& target);
double boundary_loss(const std::vector<double>& scores,
                     const std::vector<double>& labels);
std::vector<std::vector<double>> attention(
    const std::vector<std::vector<double>>& fused_q,
    const std::vector<std::vector<double>>& keys,
    const std::vector<std::vector<double>>& values);

}  // namespace oracle
