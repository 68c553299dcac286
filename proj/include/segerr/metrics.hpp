#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segerr/boundary.hpp"
#include "segerr/components.hpp"
#include "segerr/types.hpp"

namespace segerr {

/// Row-major M x M count matrix; entry (gt, pred) counts non-ignore points.
struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<std::uint64_t> counts;  // num_classes * num_classes

  std::uint64_t& at(int gt, int pred) { return counts[static_cast<std::size_t>(gt) * num_classes + pred]; }
  std::uint64_t at(int gt, int pred) const { return counts[static_cast<std::size_t>(gt) * num_classes + pred]; }
  std::uint64_t total() const;
  std::uint64_t row_sum(int gt) const;
  std::uint64_t col_sum(int pred) const;
};

/// Every metric plus the raw counters it derives from. Counters aggregate
/// exactly across scenes; metrics are recomputed from counters with a single
/// final division, so a metric whose denominator is zero is absent, never 0/0.
struct MetricsReport {
  // protocol echo (aggregation requires matching values)
  int num_classes = 0;
  double radius_m = 0.0;
  double iou_threshold = 0.0;
  int min_component_size = 0;
  std::int32_t ignore_label = -1;
  DerrSamples derr_samples = DerrSamples::kClassMask;
  std::map<std::string, std::vector<std::int32_t>> groups;

  // raw counters
  std::uint64_t num_scenes = 0;
  ConfusionMatrix confusion;
  std::uint64_t pred_boundary_count = 0;      // |P_r|
  std::uint64_t gt_boundary_count = 0;        // |G_r|
  std::uint64_t boundary_intersection = 0;    // |P_r AND G_r|
  std::uint64_t rerr_tp = 0;                  // TP_theta
  std::uint64_t rerr_all = 0;                 // All_theta
  std::uint64_t derr_num = 0;
  std::uint64_t derr_den = 0;

  // derived metrics (absent when the backing denominator is zero)
  std::vector<std::optional<double>> per_class_iou;
  std::optional<double> miou, macc, oacc;
  std::map<std::string, std::optional<double>> group_iou;
  std::optional<double> ferr, merr, rerr, derr;
};

/// Recomputes every derived metric of `report` from its raw counters.
void recompute_metrics(MetricsReport& report);

struct TraditionalMetrics {
  ConfusionMatrix confusion;
  std::vector<std::optional<double>> per_class_iou;
  std::optional<double> miou, macc, oacc;
  std::map<std::string, std::optional<double>> group_iou;
};

/// mIoU / mAcc / oAcc / per-group IoU from exact confusion counts. Classes
/// absent from both ground truth and prediction are excluded from the mIoU
/// mean; mAcc averages over classes present in ground truth.
TraditionalMetrics traditional_metrics(const SceneBundle& bundle,
                                       const ClassGroups& groups);

struct FerrMerrResult {
  OverlapCounts counts;
  std::optional<double> ferr;  // |P_r - (G_r AND P_r)| / |P_r|
  std::optional<double> merr;  // |G_r - (P_r AND G_r)| / |G_r|
};

/// False-response and merging error from the two boundary pseudo-label masks
/// (gt mask realizes G_r, prediction mask realizes P_r).
FerrMerrResult ferr_merr(const BoundaryMask& gt_boundary,
                         const BoundaryMask& pred_boundary);

struct RerrResult {
  std::uint64_t tp = 0;
  std::uint64_t all = 0;
  std::optional<double> rerr;  // 1 - tp/all
};

/// Region classification error over ground-truth components of at least
/// cfg.min_component_size points. For each sample C the candidate prediction
/// is the union of predicted components, extracted at the same radius, whose
/// label is C's plurality-predicted label and which intersect C; the sample
/// qualifies when the binary-mask IoU strictly exceeds cfg.iou_threshold.
RerrResult region_classification_error(
    const SceneBundle& bundle, const std::vector<Component>& gt_components,
    const std::vector<Component>& pred_components);

struct DerrResult {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  std::optional<double> derr;  // 1 - num/den
};

/// Displacement error. Samples are per-class binary masks by default, or
/// ground-truth components when cfg.derr_samples == kComponent. A qualifying
/// sample (IoU > theta) contributes |(P_r AND P) AND (G_r AND G)| to the
/// numerator and |G AND G_r| to the denominator, where the _r masks are the
/// width-r contour strips of P and G.
DerrResult displacement_error(const SceneBundle& bundle,
                              const SpatialGrid& grid, int workers = 0);

/// Full evaluation of one scene: traditional metrics plus the four error
/// metrics, with boundary masks computed once and reused.
MetricsReport evaluate_scene(const PointCloud& cloud, const LabelField& gt,
                             const LabelField& pred, const EvalConfig& cfg,
                             const ClassGroups& groups = {}, int workers = 0);

/// Micro-average: sums raw counters across reports (which must share the
/// protocol echo) and recomputes every metric once.
MetricsReport aggregate(const std::vector<MetricsReport>& reports);

}  // namespace segerr
