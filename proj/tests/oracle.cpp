#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace oracle {

using namespace segerr;

double dist2(const Vec3f& a, const Vec3f& b) {
  const double dx = static_cast<double>(a[0]) - static_cast<double>(b[0]);
  const double dy = static_cast<double>(a[1]) - static_cast<double>(b[1]);
  const double dz = static_cast<double>(a[2]) - static_cast<double>(b[2]);
  return dx * dx + dy * dy + dz * dz;
}

std::vector<std::uint32_t> neighbors(const PointCloud& cloud, std::uint32_t query,
                                     double r) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t j = 0; j < cloud.count(); ++j) {
    if (j == query) continue;
    if (dist2(cloud.positions[query], cloud.positions[j]) <= r * r) out.push_back(j);
  }
  return out;
}

BoundaryMask boundary_mask(const PointCloud& cloud, const LabelField& labels,
                           double r) {
  const std::size_t n = cloud.count();
  BoundaryMask out;
  out.flags.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels.is_ignored(i)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || labels.is_ignored(j)) continue;
      if (labels.labels[j] == labels.labels[i]) continue;
      if (dist2(cloud.positions[i], cloud.positions[j]) <= r * r) {
        out.flags[i] = 1;
        break;
      }
    }
  }
  return out;
}

BoundaryMask boundary_zone(const PointCloud& cloud,
                           const std::vector<std::uint8_t>& mask,
                           const std::vector<std::uint8_t>& valid, double r) {
  const std::size_t n = cloud.count();
  BoundaryMask out;
  out.flags.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !valid[j]) continue;
      if ((mask[j] != 0) == (mask[i] != 0)) continue;
      if (dist2(cloud.positions[i], cloud.positions[j]) <= r * r) {
        out.flags[i] = 1;
        break;
      }
    }
  }
  return out;
}

std::vector<std::set<std::uint32_t>> components_bfs(const PointCloud& cloud,
                                                    const LabelField& labels,
                                                    double r) {
  const std::size_t n = cloud.count();
  std::vector<bool> visited(n, false);
  std::vector<std::set<std::uint32_t>> comps;
  for (std::uint32_t start = 0; start < n; ++start) {
    if (visited[start] || labels.is_ignored(start)) continue;
    std::set<std::uint32_t> comp;
    std::deque<std::uint32_t> queue{start};
    visited[start] = true;
    while (!queue.empty()) {
      const std::uint32_t i = queue.front();
      queue.pop_front();
      comp.insert(i);
      for (std::uint32_t j = 0; j < n; ++j) {
        if (visited[j] || labels.is_ignored(j)) continue;
        if (labels.labels[j] != labels.labels[i]) continue;
        if (dist2(cloud.positions[i], cloud.positions[j]) <= r * r) {
          visited[j] = true;
          queue.push_back(j);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

namespace {

std::int32_t naive_plurality(const std::set<std::uint32_t>& comp,
                             const LabelField& pred) {
  std::map<std::int32_t, std::size_t> counts;
  for (const std::uint32_t i : comp) ++counts[pred.labels[i]];
  std::int32_t best = 0;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

MetricsReport evaluate(const PointCloud& cloud, const LabelField& gt,
                       const LabelField& pred, const EvalConfig& cfg,
                       const ClassGroups& groups) {
  const std::size_t n = cloud.count();
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

  for (std::size_t i = 0; i < n; ++i) {
    if (gt.is_ignored(i)) continue;
    ++report.confusion.at(gt.labels[i], pred.labels[i]);
  }

  if (n > 0) {
    const BoundaryMask gt_bound = boundary_mask(cloud, gt, cfg.radius_m);
    const BoundaryMask pred_bound = boundary_mask(cloud, pred, cfg.radius_m);
    for (std::size_t i = 0; i < n; ++i) {
      report.gt_boundary_count += gt_bound.flags[i] ? 1 : 0;
      report.pred_boundary_count += pred_bound.flags[i] ? 1 : 0;
      report.boundary_intersection += (gt_bound.flags[i] && pred_bound.flags[i]) ? 1 : 0;
    }

    // region classification error over BFS components and set algebra
    const auto gt_comps = components_bfs(cloud, gt, cfg.radius_m);
    const auto pred_comps = components_bfs(cloud, pred, cfg.radius_m);
    for (const auto& comp : gt_comps) {
      if (comp.size() < static_cast<std::size_t>(cfg.min_component_size)) continue;
      const std::int32_t winner = naive_plurality(comp, pred);
      std::set<std::uint32_t> candidate;
      for (const auto& pc : pred_comps) {
        if (pred.labels[*pc.begin()] != winner) continue;
        std::vector<std::uint32_t> common;
        std::set_intersection(pc.begin(), pc.end(), comp.begin(), comp.end(),
                              std::back_inserter(common));
        if (!common.empty()) candidate.insert(pc.begin(), pc.end());
      }
      std::vector<std::uint32_t> inter, uni;
      std::set_intersection(candidate.begin(), candidate.end(), comp.begin(),
                            comp.end(), std::back_inserter(inter));
      std::set_union(candidate.begin(), candidate.end(), comp.begin(), comp.end(),
                     std::back_inserter(uni));
      const double iou = uni.empty() ? 0.0
                                     : static_cast<double>(inter.size()) /
                                           static_cast<double>(uni.size());
      if (iou > cfg.iou_threshold) {
        ++report.rerr_all;
        const std::int32_t comp_label = gt.labels[*comp.begin()];
        if (winner == comp_label) ++report.rerr_tp;
      }
    }

    // displacement error
    std::vector<std::uint8_t> valid(n);
    for (std::size_t i = 0; i < n; ++i) valid[i] = gt.is_ignored(i) ? 0 : 1;
    const auto strip_tally = [&](const std::vector<std::uint8_t>& pred_mask,
                                 const std::vector<std::uint8_t>& gt_mask) {
      const BoundaryMask pz = boundary_zone(cloud, pred_mask, valid, cfg.radius_m);
      const BoundaryMask gz = boundary_zone(cloud, gt_mask, valid, cfg.radius_m);
      for (std::size_t i = 0; i < n; ++i) {
        const bool g_strip = gt_mask[i] && gz.flags[i];
        report.derr_den += g_strip ? 1 : 0;
        report.derr_num += (g_strip && pred_mask[i] && pz.flags[i]) ? 1 : 0;
      }
    };
    if (cfg.derr_samples == DerrSamples::kClassMask) {
      for (std::int32_t c = 0; c < cfg.num_classes; ++c) {
        std::vector<std::uint8_t> gmask(n, 0), pmask(n, 0);
        std::uint64_t gcount = 0, pcount = 0, inter = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!valid[i]) continue;
          gmask[i] = gt.labels[i] == c ? 1 : 0;
          pmask[i] = pred.labels[i] == c ? 1 : 0;
          gcount += gmask[i];
          pcount += pmask[i];
          inter += (gmask[i] && pmask[i]) ? 1 : 0;
        }
        if (gcount == 0) continue;
        const double iou = static_cast<double>(inter) /
                           static_cast<double>(gcount + pcount - inter);
        if (iou > cfg.iou_threshold) strip_tally(pmask, gmask);
      }
    } else {
      for (const auto& comp : gt_comps) {
        if (comp.size() < static_cast<std::size_t>(cfg.min_component_size)) continue;
        const std::int32_t label = gt.labels[*comp.begin()];
        std::set<std::uint32_t> candidate;
        for (const auto& pc : pred_comps) {
          if (pred.labels[*pc.begin()] != label) continue;
          std::vector<std::uint32_t> common;
          std::set_intersection(pc.begin(), pc.end(), comp.begin(), comp.end(),
                                std::back_inserter(common));
          if (!common.empty()) candidate.insert(pc.begin(), pc.end());
        }
        std::vector<std::uint32_t> inter, uni;
        std::set_intersection(candidate.begin(), candidate.end(), comp.begin(),
                              comp.end(), std::back_inserter(inter));
        std::set_union(candidate.begin(), candidate.end(), comp.begin(), comp.end(),
                       std::back_inserter(uni));
        const double iou = uni.empty() ? 0.0
                                       : static_cast<double>(inter.size()) /
                                             static_cast<double>(uni.size());
        if (!(iou > cfg.iou_threshold)) continue;
        std::vector<std::uint8_t> gmask(n, 0), pmask(n, 0);
        for (const std::uint32_t i : comp) gmask[i] = 1;
        for (const std::uint32_t i : candidate) pmask[i] = 1;
        strip_tally(pmask, gmask);
      }
    }
  }

  // independent metric derivation
  report.per_class_iou.assign(cfg.num_classes, std::nullopt);
  double iou_sum = 0.0, acc_sum = 0.0;
  std::size_t iou_n = 0, acc_n = 0;
  std::uint64_t trace = 0, total = 0;
  for (std::int32_t c = 0; c < cfg.num_classes; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::int32_t k = 0; k < cfg.num_classes; ++k) {
      row += report.confusion.at(c, k);
      col += report.confusion.at(k, c);
    }
    const std::uint64_t diag = report.confusion.at(c, c);
    trace += diag;
    total += row;
    if (row + col > 0) {
      const double iou =
          static_cast<double>(diag) / static_cast<double>(row + col - diag);
      report.per_class_iou[c] = iou;
      iou_sum += iou;
      ++iou_n;
    }
    if (row > 0) {
      acc_sum += static_cast<double>(diag) / static_cast<double>(row);
      ++acc_n;
    }
  }
  if (iou_n > 0) report.miou = iou_sum / static_cast<double>(iou_n);
  if (acc_n > 0) report.macc = acc_sum / static_cast<double>(acc_n);
  if (total > 0) report.oacc = static_cast<double>(trace) / static_cast<double>(total);
  for (const auto& [name, ids] : groups.groups) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const std::int32_t id : ids) {
      if (report.per_class_iou[id]) {
        sum += *report.per_class_iou[id];
        ++count;
      }
    }
    report.group_iou[name] =
        count > 0 ? std::optional<double>(sum / static_cast<double>(count))
                  : std::nullopt;
  }
  if (report.pred_boundary_count > 0) {
    report.ferr = static_cast<double>(report.pred_boundary_count -
                                      report.boundary_intersection) /
                  static_cast<double>(report.pred_boundary_count);
  }
  if (report.gt_boundary_count > 0) {
    report.merr = static_cast<double>(report.gt_boundary_count -
                                      report.boundary_intersection) /
                  static_cast<double>(report.gt_boundary_count);
  }
  if (report.rerr_all > 0) {
    report.rerr = 1.0 - static_cast<double>(report.rerr_tp) /
                            static_cast<double>(report.rerr_all);
  }
  if (report.derr_den > 0) {
    report.derr = 1.0 - static_cast<double>(report.derr_num) /
                            static_cast<double>(report.derr_den);
  }
  return report;
}

double dice(const std::vector<std::vector<double>>& pred,
            const std::vector<std::vector<double>>& target) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < pred[i].size(); ++j) {
      num += pred[i][j] * target[i][j];
      den += pred[i][j] * pred[i][j] + target[i][j] * target[i][j];
    }
  }
  return 1.0 - 2.0 * num / den;
}

double semantic_loss(const std::vector<std::vector<double>>& pred,
                     const std::vector<std::vector<double>>& target) {
  const double eps = 1e-7;
  double ce = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double hit = 0.0;
    for (std::size_t j = 0; j < pred[i].size(); ++j) hit += pred[i][j] * target[i][j];
    ce += -std::log(std::min(1.0 - eps, std::max(eps, hit)));
  }
  return ce / static_cast<double>(pred.size()) + dice(pred, target);
}

double boundary_loss(const std::vector<double>& scores,
                     const std::vector<double>& labels) {
  const double eps = 1e-7;
  double bce = 0.0, num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double e = std::min(1.0 - eps, std::max(eps, scores[i]));
    bce += -(labels[i] * std::log(e) + (1.0 - labels[i]) * std::log(1.0 - e));
    num += scores[i] * labels[i];
    den += scores[i] + labels[i];
  }
  const double dice_term = den > 0.0 ? 1.0 - 2.0 * num / den : 0.0;
  return bce / static_cast<double>(scores.size()) + dice_term;
}

std::vector<std::vector<double>> attention(
    const std::vector<std::vector<double>>& fused_q,
    const std::vector<std::vector<double>>& keys,
    const std::vector<std::vector<double>>& values) {
  const std::size_t n = fused_q.size();
  const std::size_t dk = fused_q.empty() ? 0 : fused_q[0].size();
  std::vector<std::vector<double>> out(n, std::vector<double>(dk, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> logits(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < dk; ++k) dot += fused_q[i][k] * keys[j][k];
      logits[j] = dot / std::sqrt(static_cast<double>(dk));
    }
    double peak = logits[0];
    for (const double l : logits) peak = std::max(peak, l);
    double sum = 0.0;
    for (double& l : logits) {
      l = std::exp(l - peak);
      sum += l;
    }
    for (double& l : logits) l /= sum;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < dk; ++k) out[i][k] += logits[j] * values[j][k];
    }
  }
  return out;
}

}  // namespace oracle
