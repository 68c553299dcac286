#include "segerr/types.hpp"

#include <cmath>
#include <set>
#include <string>

namespace segerr {

namespace {

void check_length(const char* what, std::size_t got, std::size_t want) {
  if (got != want) {
    throw ValidationError(std::string(what) + " length " + std::to_string(got) +
                          " does not match point count " + std::to_string(want));
  }
}

void check_labels(const char* side, const LabelField& field, int num_classes,
                  bool allow_ignore) {
  for (std::size_t i = 0; i < field.labels.size(); ++i) {
    const std::int32_t label = field.labels[i];
    if (label == field.ignore_label) {
      if (!allow_ignore) {
        throw ValidationError(std::string(side) + " contains ignore label at index " +
                              std::to_string(i));
      }
      continue;
    }
    if (label < 0 || label >= num_classes) {
      throw ValidationError(std::string(side) + " label " + std::to_string(label) +
                            " at index " + std::to_string(i) + " outside [0, " +
                            std::to_string(num_classes) + ")");
    }
  }
}

}  // namespace

void validate_config(const EvalConfig& cfg) {
  if (!(cfg.radius_m > 0.0) || !std::isfinite(cfg.radius_m)) {
    throw ValidationError("radius_m must be positive and finite");
  }
  if (!(cfg.iou_threshold > 0.0 && cfg.iou_threshold < 1.0)) {
    throw ValidationError("iou_threshold must lie in (0, 1)");
  }
  if (cfg.num_classes < 1) {
    throw ValidationError("num_classes must be at least 1");
  }
  if (cfg.min_component_size < 1) {
    throw ValidationError("min_component_size must be at least 1");
  }
}

SceneBundle validate_scene(const PointCloud& cloud, const LabelField& gt,
                           const LabelField& pred, const EvalConfig& cfg) {
  validate_config(cfg);
  const std::size_t n = cloud.count();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3f& p = cloud.positions[i];
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2])) {
      throw ValidationError("non-finite coordinate at point " + std::to_string(i));
    }
  }
  if (cloud.colors) check_length("colors", cloud.colors->size(), n);
  if (cloud.normals) check_length("normals", cloud.normals->size(), n);
  check_length("ground-truth labels", gt.count(), n);
  check_length("prediction labels", pred.count(), n);
  check_labels("ground truth", gt, cfg.num_classes, /*allow_ignore=*/true);
  check_labels("prediction", pred, cfg.num_classes, /*allow_ignore=*/false);
  return SceneBundle{&cloud, &gt, &pred, cfg};
}

void validate_groups(const ClassGroups& groups, int num_classes) {
  std::set<std::int32_t> seen;
  for (const auto& [name, ids] : groups.groups) {
    for (const std::int32_t id : ids) {
      if (id < 0 || id >= num_classes) {
        throw ValidationError("group '" + name + "' contains class id " +
                              std::to_string(id) + " outside [0, " +
                              std::to_string(num_classes) + ")");
      }
      if (!seen.insert(id).second) {
        throw ValidationError("class id " + std::to_string(id) +
                              " appears in more than one group");
      }
    }
  }
}

}  // namespace segerr
