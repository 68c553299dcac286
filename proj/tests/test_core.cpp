#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "segerr/types.hpp"

using namespace segerr;
using testutil::make_cloud;
using testutil::make_labels;

TEST_SUITE_BEGIN("core");

namespace {

EvalConfig small_config(int num_classes = 2) {
  EvalConfig cfg;
  cfg.num_classes = num_classes;
  return cfg;
}

}  // namespace

TEST_CASE("a consistent scene validates") {
  const PointCloud cloud = make_cloud({{0, 0, 0}, {0.1f, 0, 0}, {0.2f, 0, 0}});
  const LabelField gt = make_labels({0, 1, -1});
  const LabelField pred = make_labels({0, 1, 1});
  const SceneBundle bundle = validate_scene(cloud, gt, pred, small_config());
  CHECK(bundle.cloud == &cloud);
  CHECK(bundle.cfg.num_classes == 2);
}

TEST_CASE("length mismatches are rejected") {
  const PointCloud cloud = make_cloud({{0, 0, 0}, {0.1f, 0, 0}, {0.2f, 0, 0}});
  CHECK_THROWS_AS(
      validate_scene(cloud, make_labels({0, 1}), make_labels({0, 1, 1}), small_config()),
      ValidationError);
  CHECK_THROWS_AS(
      validate_scene(cloud, make_labels({0, 1, 0}), make_labels({0, 1}), small_config()),
      ValidationError);

  PointCloud with_colors = cloud;
  with_colors.colors.emplace(2);  // wrong length
  CHECK_THROWS_AS(validate_scene(with_colors, make_labels({0, 1, 0}),
                                 make_labels({0, 1, 1}), small_config()),
                  ValidationError);
}

TEST_CASE("prediction may not contain the ignore label") {
  const PointCloud cloud = make_cloud({{0, 0, 0}, {0.1f, 0, 0}});
  CHECK_THROWS_WITH_AS(
      validate_scene(cloud, make_labels({0, 1}), make_labels({0, -1}), small_config()),
      doctest::Contains("ignore label"), ValidationError);
}

TEST_CASE("labels outside [0, num_classes) are rejected") {
  const PointCloud cloud = make_cloud({{0, 0, 0}, {0.1f, 0, 0}});
  CHECK_THROWS_AS(
      validate_scene(cloud, make_labels({0, 2}), make_labels({0, 1}), small_config()),
      ValidationError);
  CHECK_THROWS_AS(
      validate_scene(cloud, make_labels({0, -5}), make_labels({0, 1}), small_config()),
      ValidationError);
}

TEST_CASE("non-finite coordinates are rejected") {
  PointCloud cloud = make_cloud({{0, 0, 0}, {0.1f, 0, 0}});
  cloud.positions[1][2] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(
      validate_scene(cloud, make_labels({0, 1}), make_labels({0, 1}), small_config()),
      ValidationError);
  cloud.positions[1][2] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(
      validate_scene(cloud, make_labels({0, 1}), make_labels({0, 1}), small_config()),
      ValidationError);
}

TEST_CASE("config invariants") {
  EvalConfig cfg = small_config();
  cfg.radius_m = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = small_config();
  cfg.iou_threshold = 1.0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = small_config();
  cfg.iou_threshold = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = small_config();
  cfg.num_classes = 0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg = small_config();
  cfg.min_component_size = 0;
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
}

TEST_CASE("groups must be disjoint and in range") {
  ClassGroups ok;
  ok.groups = {{"head", {0, 1}}, {"tail", {2}}};
  validate_groups(ok, 3);

  ClassGroups overlapping;
  overlapping.groups = {{"a", {0}}, {"b", {0}}};
  CHECK_THROWS_AS(validate_groups(overlapping, 3), ValidationError);

  ClassGroups out_of_range;
  out_of_range.groups = {{"a", {5}}};
  CHECK_THROWS_AS(validate_groups(out_of_range, 3), ValidationError);
}

TEST_SUITE_END();
