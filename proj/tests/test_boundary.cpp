#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "oracle.hpp"
#include "segerr/boundary.hpp"
#include "segerr/rng.hpp"

using namespace segerr;
using testutil::make_chain;
using testutil::make_cloud;
using testutil::make_labels;

namespace {

// 11 colinear points at 2 cm pitch, class 0 through x = 0.10, class 1 from
// x = 0.12 on.
LabelField chain_labels() {
  return make_labels({0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
}

}  // namespace

TEST_SUITE_BEGIN("boundary");

TEST_CASE("uniform label field has no boundary points") {
  const auto scene = testutil::random_blobs(500, 2, /*num_classes=*/1);
  const BoundaryMask mask = compute_boundary_mask(scene.cloud, scene.labels, 0.06);
  CHECK(mask.count_true() == 0);
}

TEST_CASE("two-class chain boundary points") {
  const PointCloud cloud = make_chain(11, 0.02);
  const LabelField labels = chain_labels();
  const BoundaryMask mask = compute_boundary_mask(cloud, labels, 0.06);
  const BoundaryMask reference = oracle::boundary_mask(cloud, labels, 0.06);
  CHECK(mask.flags == reference.flags);
  // x in {0.06, 0.08, 0.10, 0.12, 0.14, 0.16}
  const std::vector<std::uint8_t> expected{0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 0};
  CHECK(mask.flags == expected);
  CHECK(mask.count_true() == 6);
}

TEST_CASE("ignored points neither become nor create boundaries") {
  const PointCloud cloud = make_chain(11, 0.02);
  LabelField labels = chain_labels();
  labels.labels[5] = -1;  // the point at x = 0.10
  const BoundaryMask mask = compute_boundary_mask(cloud, labels, 0.06);
  const BoundaryMask reference = oracle::boundary_mask(cloud, labels, 0.06);
  CHECK(mask.flags == reference.flags);
  CHECK(mask.flags[5] == 0);
  CHECK(mask.flags[2] == 0);
}

TEST_CASE("grid mask equals the quadratic oracle across radii") {
  for (const std::uint64_t seed : {31u, 32u, 33u}) {
    const auto scene = testutil::random_blobs(1500, seed, /*num_classes=*/3);
    for (const double r : {0.02, 0.06, 0.10}) {
      const BoundaryMask fast = compute_boundary_mask(scene.cloud, scene.labels, r);
      const BoundaryMask slow = oracle::boundary_mask(scene.cloud, scene.labels, r);
      CHECK(fast.flags == slow.flags);
      const BoundaryMask brute =
          compute_boundary_mask_brute(scene.cloud, scene.labels, r);
      CHECK(brute.flags == slow.flags);
    }
  }
}

TEST_CASE("output does not depend on the worker count") {
  const auto scene = testutil::random_blobs(4000, 77, /*num_classes=*/5);
  const BoundaryMask one = compute_boundary_mask(scene.cloud, scene.labels, 0.06, 1);
  const BoundaryMask four = compute_boundary_mask(scene.cloud, scene.labels, 0.06, 4);
  const BoundaryMask eight = compute_boundary_mask(scene.cloud, scene.labels, 0.06, 8);
  CHECK(one.flags == four.flags);
  CHECK(one.flags == eight.flags);
}

TEST_CASE("boundary masks grow monotonically with the radius") {
  const auto scene = testutil::random_blobs(2000, 13, /*num_classes=*/4);
  BoundaryMask previous;
  bool first = true;
  for (const double r : {0.02, 0.04, 0.06, 0.08, 0.10}) {
    const BoundaryMask mask = compute_boundary_mask(scene.cloud, scene.labels, r);
    if (!first) {
      for (std::size_t i = 0; i < mask.count(); ++i) {
        if (previous.flags[i]) CHECK(mask.flags[i]);
      }
    }
    previous = mask;
    first = false;
  }
}

TEST_CASE("boundary points pair up across the label divide") {
  const auto scene = testutil::random_blobs(1200, 8, /*num_classes=*/2);
  const double r = 0.06;
  const BoundaryMask mask = compute_boundary_mask(scene.cloud, scene.labels, r);
  for (std::uint32_t i = 0; i < scene.cloud.count(); ++i) {
    if (!mask.flags[i]) continue;
    bool partner = false;
    for (const std::uint32_t j : brute_force_neighbors(scene.cloud, i, r)) {
      if (scene.labels.labels[j] != scene.labels.labels[i] && mask.flags[j]) {
        partner = true;
        break;
      }
    }
    CHECK(partner);
  }
}

TEST_CASE("ignored points are invisible to the rest of the scene") {
  auto scene = testutil::random_blobs(800, 55, /*num_classes=*/3);
  Rng rng(4);
  std::vector<bool> drop(scene.cloud.count(), false);
  for (std::size_t i = 0; i < drop.size(); ++i) drop[i] = rng.next_double() < 0.2;
  LabelField with_ignores = scene.labels;
  for (std::size_t i = 0; i < drop.size(); ++i) {
    if (drop[i]) with_ignores.labels[i] = with_ignores.ignore_label;
  }
  const BoundaryMask full = compute_boundary_mask(scene.cloud, with_ignores, 0.06);

  PointCloud reduced;
  LabelField reduced_labels;
  std::vector<std::uint32_t> kept;
  for (std::uint32_t i = 0; i < scene.cloud.count(); ++i) {
    if (drop[i]) continue;
    reduced.positions.push_back(scene.cloud.positions[i]);
    reduced_labels.labels.push_back(scene.labels.labels[i]);
    kept.push_back(i);
  }
  const BoundaryMask sub = compute_boundary_mask(reduced, reduced_labels, 0.06);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    CHECK(full.flags[kept[k]] == sub.flags[k]);
  }
}

TEST_CASE("all-true mask has no contour") {
  const auto scene = testutil::random_blobs(300, 21);
  const std::vector<std::uint8_t> mask(scene.cloud.count(), 1);
  const std::vector<std::uint8_t> valid(scene.cloud.count(), 1);
  const BoundaryMask zone = binary_boundary_zone(scene.cloud, mask, valid, 0.06);
  CHECK(zone.count_true() == 0);
}

TEST_CASE("halfspace mask zone reduces to the two-label boundary") {
  const PointCloud cloud = make_chain(11, 0.02);
  std::vector<std::uint8_t> mask(11, 0);
  for (int i = 0; i <= 5; ++i) mask[i] = 1;  // x <= 0.10
  const std::vector<std::uint8_t> valid(11, 1);
  const BoundaryMask zone = binary_boundary_zone(cloud, mask, valid, 0.06);
  const std::vector<std::uint8_t> expected{0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 0};
  CHECK(zone.flags == expected);
  CHECK(zone.flags == oracle::boundary_zone(cloud, mask, valid, 0.06).flags);
}

TEST_CASE("checkerboard zone marks points beside tile edges") {
  SceneSpec spec;
  spec.kind = SceneKind::kCheckerboard;
  spec.extent = {0.38, 0.38};  // 20 x 20 points at 2 cm pitch
  spec.pitch = 0.02;
  spec.tile = 0.1;
  const Scene scene = generate_scene(spec);
  REQUIRE(scene.cloud.count() == 400);
  std::vector<std::uint8_t> mask(scene.cloud.count());
  const std::vector<std::uint8_t> valid(scene.cloud.count(), 1);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = scene.labels.labels[i] ? 1 : 0;

  // exact oracle agreement at the stated radius
  const BoundaryMask zone = binary_boundary_zone(scene.cloud, mask, valid, 0.02);
  CHECK(zone.flags == oracle::boundary_zone(scene.cloud, mask, valid, 0.02).flags);

  // the analytic picture: only axis-aligned lattice neighbors across a tile
  // edge, checked at a radius with slack for float lattice rounding (still
  // below the 2.83 cm diagonal)
  const BoundaryMask relaxed = binary_boundary_zone(scene.cloud, mask, valid, 0.021);
  const auto parity = [](int ix, int iy) { return ((ix / 5) + (iy / 5)) & 1; };
  for (int iy = 0; iy < 20; ++iy) {
    for (int ix = 0; ix < 20; ++ix) {
      const int p = parity(ix, iy);
      bool expected = false;
      if (ix > 0 && parity(ix - 1, iy) != p) expected = true;
      if (ix < 19 && parity(ix + 1, iy) != p) expected = true;
      if (iy > 0 && parity(ix, iy - 1) != p) expected = true;
      if (iy < 19 && parity(ix, iy + 1) != p) expected = true;
      CHECK(static_cast<bool>(relaxed.flags[iy * 20 + ix]) == expected);
    }
  }
}

TEST_CASE("overlap counts") {
  BoundaryMask a, b;
  a.flags = {1, 0, 1, 1, 0};
  b.flags = a.flags;
  auto counts = boundary_overlap_counts(a, b);
  CHECK(counts.count_a == 3);
  CHECK(counts.count_b == 3);
  CHECK(counts.count_both == 3);

  b.flags = {0, 1, 0, 0, 1};
  counts = boundary_overlap_counts(a, b);
  CHECK(counts.count_both == 0);

  Rng rng(6);
  a.flags.resize(1000);
  b.flags.resize(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    a.flags[i] = rng.next_double() < 0.5;
    b.flags[i] = rng.next_double() < 0.5;
  }
  counts = boundary_overlap_counts(a, b);
  std::uint64_t na = 0, nb = 0, nboth = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    na += a.flags[i];
    nb += b.flags[i];
    nboth += a.flags[i] && b.flags[i];
  }
  CHECK(counts.count_a == na);
  CHECK(counts.count_b == nb);
  CHECK(counts.count_both == nboth);
}

TEST_CASE("length mismatches are rejected") {
  const PointCloud cloud = make_chain(4, 0.02);
  CHECK_THROWS_AS(compute_boundary_mask(cloud, make_labels({0, 1}), 0.05),
                  ValidationError);
  BoundaryMask a, b;
  a.flags = {1, 0};
  b.flags = {1};
  CHECK_THROWS_AS(boundary_overlap_counts(a, b), ValidationError);
  CHECK_THROWS_AS(binary_boundary_zone(cloud, {1, 0}, {1, 1, 1, 1}, 0.05),
                  ValidationError);
}

TEST_SUITE_END();
