#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "oracle.hpp"
#include "segerr/rng.hpp"
#include "segerr/spatial.hpp"

using namespace segerr;
using testutil::make_cloud;

TEST_SUITE_BEGIN("spatial");

TEST_CASE("unit cube corners occupy eight distinct cells") {
  const PointCloud cloud = make_cloud({{0, 0, 0},
                                       {0.5f, 0, 0},
                                       {0, 0.5f, 0},
                                       {0, 0, 0.5f},
                                       {0.5f, 0.5f, 0},
                                       {0.5f, 0, 0.5f},
                                       {0, 0.5f, 0.5f},
                                       {0.5f, 0.5f, 0.5f}});
  const SpatialGrid grid = build_grid(cloud, 0.5);
  CHECK(grid.occupied_cell_count() == 8);
}

TEST_CASE("coincident points share one cell") {
  std::vector<Vec3f> positions(100, Vec3f{0.25f, 0.25f, 0.25f});
  const PointCloud cloud = make_cloud(std::move(positions));
  const SpatialGrid grid = build_grid(cloud, 1.0);
  CHECK(grid.occupied_cell_count() == 1);
  const auto range = grid.range(0);
  CHECK(range.end - range.begin == 100);
  // coincident points are mutual neighbors at any positive radius
  const auto nb = radius_neighbors(grid, cloud, 0, 1e-6);
  CHECK(nb.size() == 99);
}

TEST_CASE("every point is recoverable from its cell range") {
  Rng rng(11);
  std::vector<Vec3f> positions;
  for (int i = 0; i < 10000; ++i) {
    positions.push_back({static_cast<float>(rng.next_double()),
                         static_cast<float>(rng.next_double()),
                         static_cast<float>(rng.next_double())});
  }
  const PointCloud cloud = make_cloud(std::move(positions));
  const SpatialGrid grid = build_grid(cloud, 0.06);
  for (std::uint32_t i = 0; i < cloud.count(); ++i) {
    const auto range = grid.range(grid.point_cell()[i]);
    bool found = false;
    for (std::uint32_t k = range.begin; k < range.end && !found; ++k) {
      found = grid.permutation()[k] == i;
    }
    CHECK(found);
  }
}

TEST_CASE("points land inside their assigned cells") {
  const auto scene = testutil::random_blobs(2000, 3);
  const SpatialGrid grid = build_grid(scene.cloud, 0.05);
  for (std::uint32_t i = 0; i < scene.cloud.count(); ++i) {
    const auto c = grid.cell_coords(scene.cloud.positions[i]);
    CHECK(grid.find_cell(c[0], c[1], c[2]) == grid.point_cell()[i]);
  }
}

TEST_CASE("permutation is a bijection over point indices") {
  const auto scene = testutil::random_blobs(3000, 5);
  const SpatialGrid grid = build_grid(scene.cloud, 0.06);
  std::vector<std::uint32_t> perm = grid.permutation();
  std::sort(perm.begin(), perm.end());
  for (std::uint32_t i = 0; i < perm.size(); ++i) CHECK(perm[i] == i);
}

TEST_CASE("two builds over the same input are identical") {
  const auto scene = testutil::random_blobs(2500, 17);
  const SpatialGrid a = build_grid(scene.cloud, 0.06);
  const SpatialGrid b = build_grid(scene.cloud, 0.06);
  CHECK(a == b);
}

TEST_CASE("build rejects bad input") {
  CHECK_THROWS_AS(build_grid(PointCloud{}, 0.1), ValidationError);
  const PointCloud cloud = make_cloud({{0, 0, 0}});
  CHECK_THROWS_AS(build_grid(cloud, 0.0), ValidationError);
  CHECK_THROWS_AS(build_grid(cloud, -0.5), ValidationError);
}

TEST_CASE("two points 5 cm apart are neighbors at 6 cm") {
  const PointCloud cloud = make_cloud({{0, 0, 0}, {0.05f, 0, 0}});
  const SpatialGrid grid = build_grid(cloud, 0.06);
  CHECK(radius_neighbors(grid, cloud, 0, 0.06) == std::vector<std::uint32_t>{1});
  CHECK(radius_neighbors(grid, cloud, 1, 0.06) == std::vector<std::uint32_t>{0});
}

TEST_CASE("closed ball includes points exactly at the radius") {
  // 0.06f < 0.06, so the float gap sits just inside the double radius; the
  // exact-equality case uses the same value for both the gap and the radius
  const PointCloud cloud = make_cloud({{0, 0, 0}, {0.06f, 0, 0}});
  const SpatialGrid grid = build_grid(cloud, 0.06);
  CHECK(radius_neighbors(grid, cloud, 0, 0.06).size() == 1);
  const double exact = static_cast<double>(cloud.positions[1][0]);
  CHECK(radius_neighbors(grid, cloud, 0, exact).size() == 1);
  CHECK(brute_force_neighbors(cloud, 0, exact).size() == 1);
}

TEST_CASE("radius larger than the cell size is an error") {
  const PointCloud cloud = make_cloud({{0, 0, 0}, {0.05f, 0, 0}});
  const SpatialGrid grid = build_grid(cloud, 0.06);
  CHECK_THROWS_AS(radius_neighbors(grid, cloud, 0, 0.061), ValidationError);
}

TEST_CASE("brute force: single point has no neighbors") {
  const PointCloud cloud = make_cloud({{0.3f, 0.2f, 0.1f}});
  CHECK(brute_force_neighbors(cloud, 0, 1.0).empty());
}

TEST_CASE("brute force: colinear chain middle point sees both ends") {
  const PointCloud cloud = testutil::make_chain(3, 0.02);
  const auto nb = brute_force_neighbors(cloud, 1, 0.02);
  CHECK(nb == std::vector<std::uint32_t>{0, 2});
}

TEST_CASE("neighbor relation is symmetric") {
  const auto scene = testutil::random_blobs(400, 23);
  for (std::uint32_t i = 0; i < scene.cloud.count(); i += 7) {
    for (const std::uint32_t j : brute_force_neighbors(scene.cloud, i, 0.05)) {
      const auto back = brute_force_neighbors(scene.cloud, j, 0.05);
      CHECK(std::find(back.begin(), back.end(), i) != back.end());
    }
  }
}

TEST_CASE("grid equals the quadratic oracle on random clouds") {
  Rng rng(99);
  for (int round = 0; round < 4; ++round) {
    const auto scene = testutil::random_blobs(2000, 100 + round);
    const double cell = 0.06;
    const SpatialGrid grid = build_grid(scene.cloud, cell);
    const double r = cell * (0.3 + 0.7 * rng.next_double());
    for (std::uint32_t i = 0; i < scene.cloud.count(); ++i) {
      CHECK(radius_neighbors(grid, scene.cloud, i, r) ==
            oracle::neighbors(scene.cloud, i, r));
    }
  }
}

TEST_SUITE_END();
