#include "segerr/metrics.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "segerr/errors.hpp"

namespace segerr {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto v : counts) sum += v;
  return sum;
}

std::uint64_t ConfusionMatrix::row_sum(int gt) const {
  std::uint64_t sum = 0;
  for (int p = 0; p < num_classes; ++p) sum += at(gt, p);
  return sum;
}

std::uint64_t ConfusionMatrix::col_sum(int pred) const {
  std::uint64_t sum = 0;
  for (int g = 0; g < num_classes; ++g) sum += at(g, pred);
  return sum;
}

namespace {

ConfusionMatrix compute_confusion(const SceneBundle& bundle) {
  ConfusionMatrix cm;
  cm.num_classes = bundle.cfg.num_classes;
  cm.counts.assign(static_cast<std::size_t>(cm.num_classes) * cm.num_classes, 0);
  const auto& gt = *bundle.gt;
  const auto& pred = *bundle.pred;
  for (std::size_t i = 0; i < gt.count(); ++i) {
    if (gt.is_ignored(i)) continue;
    ++cm.at(gt.labels[i], pred.labels[i]);
  }
  return cm;
}

struct TraditionalDerived {
  std::vector<std::optional<double>> per_class_iou;
  std::optional<double> miou, macc, oacc;
  std::map<std::string, std::optional<double>> group_iou;
};

TraditionalDerived derive_traditional(
    const ConfusionMatrix& cm,
    const std::map<std::string, std::vector<std::int32_t>>& groups) {
  TraditionalDerived out;
  const int m = cm.num_classes;
  out.per_class_iou.assign(m, std::nullopt);

  double iou_sum = 0.0;
  std::uint64_t iou_classes = 0;
  double acc_sum = 0.0;
  std::uint64_t acc_classes = 0;
  std::uint64_t trace = 0;
  for (int c = 0; c < m; ++c) {
    const std::uint64_t row = cm.row_sum(c);
    const std::uint64_t col = cm.col_sum(c);
    const std::uint64_t diag = cm.at(c, c);
    trace += diag;
    if (row + col > 0) {
      const double iou = static_cast<double>(diag) / static_cast<double>(row + col - diag);
      out.per_class_iou[c] = iou;
      iou_sum += iou;
      ++iou_classes;
    }
    if (row > 0) {
      acc_sum += static_cast<double>(diag) / static_cast<double>(row);
      ++acc_classes;
    }
  }
  if (iou_classes > 0) out.miou = iou_sum / static_cast<double>(iou_classes);
  if (acc_classes > 0) out.macc = acc_sum / static_cast<double>(acc_classes);
  const std::uint64_t total = cm.total();
  if (total > 0) out.oacc = static_cast<double>(trace) / static_cast<double>(total);

  for (const auto& [name, ids] : groups) {
    double sum = 0.0;
    std::uint64_t count = 0;
    for (const std::int32_t id : ids) {
      if (id >= 0 && id < m && out.per_class_iou[id].has_value()) {
        sum += *out.per_class_iou[id];
        ++count;
      }
    }
    out.group_iou[name] = count > 0 ? std::optional<double>(sum / static_cast<double>(count))
                                    : std::nullopt;
  }
  return out;
}

// Maps every point to the index of its predicted component, or kNone.
constexpr std::uint32_t kNone = 0xFFFFFFFFu;

std::vector<std::uint32_t> point_to_component(
    const std::vector<Component>& components, std::size_t n) {
  std::vector<std::uint32_t> map(n, kNone);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (const std::uint32_t i : components[c].point_indices) {
      map[i] = static_cast<std::uint32_t>(c);
    }
  }
  return map;
}

struct StripCounts {
  std::uint64_t num = 0;  // |(P_r AND P) AND (G_r AND G)|
  std::uint64_t den = 0;  // |G AND G_r|
};

StripCounts strip_counts(const PointCloud& cloud, const SpatialGrid& grid,
                         const std::vector<std::uint8_t>& pred_mask,
                         const std::vector<std::uint8_t>& gt_mask,
                         const std::vector<std::uint8_t>& valid, double r,
                         int workers) {
  const BoundaryMask pred_zone =
      binary_boundary_zone(cloud, pred_mask, valid, grid, r, workers);
  const BoundaryMask gt_zone =
      binary_boundary_zone(cloud, gt_mask, valid, grid, r, workers);
  StripCounts counts;
  for (std::size_t i = 0; i < cloud.count(); ++i) {
    const bool gt_strip = gt_mask[i] && gt_zone.flags[i];
    counts.den += gt_strip ? 1 : 0;
    counts.num += (gt_strip && pred_mask[i] && pred_zone.flags[i]) ? 1 : 0;
  }
  return counts;
}

}  // namespace

void recompute_metrics(MetricsReport& report) {
  const TraditionalDerived trad = derive_traditional(report.confusion, report.groups);
  report.per_class_iou = trad.per_class_iou;
  report.miou = trad.miou;
  report.macc = trad.macc;
  report.oacc = trad.oacc;
  report.group_iou = trad.group_iou;

  report.ferr = report.pred_boundary_count > 0
                    ? std::optional<double>(
                          static_cast<double>(report.pred_boundary_count -
                                              report.boundary_intersection) /
                          static_cast<double>(report.pred_boundary_count))
                    : std::nullopt;
  report.merr = report.gt_boundary_count > 0
                    ? std::optional<double>(
                          static_cast<double>(report.gt_boundary_count -
                                              report.boundary_intersection) /
                          static_cast<double>(report.gt_boundary_count))
                    : std::nullopt;
  report.rerr = report.rerr_all > 0
                    ? std::optional<double>(1.0 - static_cast<double>(report.rerr_tp) /
                                                      static_cast<double>(report.rerr_all))
                    : std::nullopt;
  report.derr = report.derr_den > 0
                    ? std::optional<double>(1.0 - static_cast<double>(report.derr_num) /
                                                      static_cast<double>(report.derr_den))
                    : std::nullopt;
}

TraditionalMetrics traditional_metrics(const SceneBundle& bundle,
                                       const ClassGroups& groups) {
  validate_groups(groups, bundle.cfg.num_classes);
  TraditionalMetrics out;
  out.confusion = compute_confusion(bundle);
  const TraditionalDerived trad = derive_traditional(out.confusion, groups.groups);
  out.per_class_iou = trad.per_class_iou;
  out.miou = trad.miou;
  out.macc = trad.macc;
  out.oacc = trad.oacc;
  out.group_iou = trad.group_iou;
  return out;
}

FerrMerrResult ferr_merr(const BoundaryMask& gt_boundary,
                         const BoundaryMask& pred_boundary) {
  FerrMerrResult out;
  const OverlapCounts counts = boundary_overlap_counts(pred_boundary, gt_boundary);
  out.counts = counts;  // count_a = |P_r|, count_b = |G_r|
  if (counts.count_a > 0) {
    out.ferr = static_cast<double>(counts.count_a - counts.count_both) /
               static_cast<double>(counts.count_a);
  }
  if (counts.count_b > 0) {
    out.merr = static_cast<double>(counts.count_b - counts.count_both) /
               static_cast<double>(counts.count_b);
  }
  return out;
}

RerrResult region_classification_error(
    const SceneBundle& bundle, const std::vector<Component>& gt_components,
    const std::vector<Component>& pred_components) {
  const auto& pred = *bundle.pred;
  const std::size_t n = bundle.cloud->count();
  const std::vector<std::uint32_t> pred_comp_of = point_to_component(pred_components, n);

  RerrResult out;
  for (const Component& sample : gt_components) {
    if (sample.size() < static_cast<std::size_t>(bundle.cfg.min_component_size)) {
      continue;
    }
    const std::int32_t winner = plurality_predicted_label(sample, pred);

    // Candidate prediction: union of predicted components labeled `winner`
    // that intersect the sample. Members predicted `winner` enumerate exactly
    // those components.
    std::set<std::uint32_t> candidate_comps;
    std::uint64_t intersection = 0;
    for (const std::uint32_t i : sample.point_indices) {
      if (pred.labels[i] == winner) {
        ++intersection;
        candidate_comps.insert(pred_comp_of[i]);
      }
    }
    std::uint64_t candidate_size = 0;
    for (const std::uint32_t c : candidate_comps) {
      candidate_size += pred_components[c].size();
    }
    const std::uint64_t uni = candidate_size + sample.size() - intersection;
    const double iou = static_cast<double>(intersection) / static_cast<double>(uni);
    if (iou > bundle.cfg.iou_threshold) {
      ++out.all;
      if (winner == sample.label) ++out.tp;
    }
  }
  if (out.all > 0) {
    out.rerr = 1.0 - static_cast<double>(out.tp) / static_cast<double>(out.all);
  }
  return out;
}

DerrResult displacement_error(const SceneBundle& bundle, const SpatialGrid& grid,
                              int workers) {
  const auto& cloud = *bundle.cloud;
  const auto& gt = *bundle.gt;
  const auto& pred = *bundle.pred;
  const double r = bundle.cfg.radius_m;
  const std::size_t n = cloud.count();

  std::vector<std::uint8_t> valid(n);
  for (std::size_t i = 0; i < n; ++i) valid[i] = gt.is_ignored(i) ? 0 : 1;

  DerrResult out;
  if (bundle.cfg.derr_samples == DerrSamples::kClassMask) {
    for (std::int32_t c = 0; c < bundle.cfg.num_classes; ++c) {
      std::vector<std::uint8_t> gt_mask(n, 0), pred_mask(n, 0);
      std::uint64_t g_count = 0, p_count = 0, inter = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) continue;
        const bool in_g = gt.labels[i] == c;
        const bool in_p = pred.labels[i] == c;
        gt_mask[i] = in_g ? 1 : 0;
        pred_mask[i] = in_p ? 1 : 0;
        g_count += in_g ? 1 : 0;
        p_count += in_p ? 1 : 0;
        inter += (in_g && in_p) ? 1 : 0;
      }
      if (g_count == 0) continue;  // samples are classes present in ground truth
      const std::uint64_t uni = g_count + p_count - inter;
      const double iou = static_cast<double>(inter) / static_cast<double>(uni);
      if (!(iou > bundle.cfg.iou_threshold)) continue;
      const StripCounts counts =
          strip_counts(cloud, grid, pred_mask, gt_mask, valid, r, workers);
      out.num += counts.num;
      out.den += counts.den;
    }
  } else {
    const std::vector<Component> gt_comps = extract_components(cloud, gt, grid, r);
    const std::vector<Component> pred_comps = extract_components(cloud, pred, grid, r);
    const std::vector<std::uint32_t> pred_comp_of = point_to_component(pred_comps, n);
    for (const Component& sample : gt_comps) {
      if (sample.size() < static_cast<std::size_t>(bundle.cfg.min_component_size)) {
        continue;
      }
      std::set<std::uint32_t> candidate_comps;
      std::uint64_t inter = 0;
      for (const std::uint32_t i : sample.point_indices) {
        if (pred.labels[i] == sample.label) {
          ++inter;
          candidate_comps.insert(pred_comp_of[i]);
        }
      }
      std::vector<std::uint8_t> gt_mask(n, 0), pred_mask(n, 0);
      for (const std::uint32_t i : sample.point_indices) gt_mask[i] = 1;
      std::uint64_t p_count = 0;
      for (const std::uint32_t c : candidate_comps) {
        p_count += pred_comps[c].size();
        for (const std::uint32_t i : pred_comps[c].point_indices) pred_mask[i] = 1;
      }
      const std::uint64_t uni = p_count + sample.size() - inter;
      const double iou = static_cast<double>(inter) / static_cast<double>(uni);
      if (!(iou > bundle.cfg.iou_threshold)) continue;
      const StripCounts counts =
          strip_counts(cloud, grid, pred_mask, gt_mask, valid, r, workers);
      out.num += counts.num;
      out.den += counts.den;
    }
  }
  if (out.den > 0) {
    out.derr = 1.0 - static_cast<double>(out.num) / static_cast<double>(out.den);
  }
  return out;
}

MetricsReport evaluate_scene(const PointCloud& cloud, const LabelField& gt,
                             const LabelField& pred, const EvalConfig& cfg,
                             const ClassGroups& groups, int workers) {
  const SceneBundle bundle = validate_scene(cloud, gt, pred, cfg);
  validate_groups(groups, cfg.num_classes);

  MetricsReport report;
  report.num_classes = cfg.num_classes;
  report.radius_m = cfg.radius_m;
  report.iou_threshold = cfg.iou_threshold;
  report.min_component_size = cfg.min_component_size;
  report.ignore_label = cfg.ignore_label;
  report.derr_samples = cfg.derr_samples;
  report.groups = groups.groups;
  report.num_scenes = 1;
  report.confusion.num_classes = cfg.num_classes;
  report.confusion.counts.assign(
      static_cast<std::size_t>(cfg.num_classes) * cfg.num_classes, 0);

  if (cloud.count() > 0) {
    report.confusion = compute_confusion(bundle);

    const SpatialGrid grid = build_grid(cloud, cfg.radius_m);
    const BoundaryMask gt_boundary =
        compute_boundary_mask(cloud, gt, grid, cfg.radius_m, workers);
    const BoundaryMask pred_boundary =
        compute_boundary_mask(cloud, pred, grid, cfg.radius_m, workers);
    const OverlapCounts overlap = boundary_overlap_counts(pred_boundary, gt_boundary);
    report.pred_boundary_count = overlap.count_a;
    report.gt_boundary_count = overlap.count_b;
    report.boundary_intersection = overlap.count_both;

    const std::vector<Component> gt_comps =
        extract_components(cloud, gt, grid, cfg.radius_m);
    const std::vector<Component> pred_comps =
        extract_components(cloud, pred, grid, cfg.radius_m);
    const RerrResult rerr = region_classification_error(bundle, gt_comps, pred_comps);
    report.rerr_tp = rerr.tp;
    report.rerr_all = rerr.all;

    const DerrResult derr = displacement_error(bundle, grid, workers);
    report.derr_num = derr.num;
    report.derr_den = derr.den;
  }

  recompute_metrics(report);
  return report;
}

MetricsReport aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw ValidationError("cannot aggregate zero reports");
  MetricsReport out = reports.front();
  for (std::size_t k = 1; k < reports.size(); ++k) {
    const MetricsReport& r = reports[k];
    if (r.num_classes != out.num_classes) {
      throw ValidationError("aggregate: reports disagree on num_classes");
    }
    if (r.groups != out.groups) {
      throw ValidationError("aggregate: reports disagree on class groups");
    }
    if (r.radius_m != out.radius_m || r.iou_threshold != out.iou_threshold ||
        r.min_component_size != out.min_component_size ||
        r.ignore_label != out.ignore_label || r.derr_samples != out.derr_samples) {
      throw ValidationError("aggregate: reports disagree on the evaluation protocol");
    }
    out.num_scenes += r.num_scenes;
    for (std::size_t i = 0; i < out.confusion.counts.size(); ++i) {
      out.confusion.counts[i] += r.confusion.counts[i];
    }
    out.pred_boundary_count += r.pred_boundary_count;
    out.gt_boundary_count += r.gt_boundary_count;
    out.boundary_intersection += r.boundary_intersection;
    out.rerr_tp += r.rerr_tp;
    out.rerr_all += r.rerr_all;
    out.derr_num += r.derr_num;
    out.derr_den += r.derr_den;
  }
  recompute_metrics(out);
  return out;
}

}  // namespace segerr
