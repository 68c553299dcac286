#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "segerr/bench.hpp"
#include "segerr/boundary.hpp"
#include "segerr/errors.hpp"
#include "segerr/io.hpp"
#include "segerr/metrics.hpp"
#include "segerr/synth.hpp"

namespace {

using namespace segerr;

std::string format_value(const std::optional<double>& value) {
  if (!value) return "absent";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *value);
  return buf;
}

std::string theta_suffix(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", theta);
  return buf;
}

int run_boundaries(const std::string& input, double radius,
                   const std::string& output, int workers) {
  auto [cloud, labels] = io::read_scene(input);
  const auto start = std::chrono::steady_clock::now();
  const BoundaryMask mask = compute_boundary_mask(cloud, labels, radius, workers);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();

  std::ofstream out(output, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + output + "' for writing");
  for (const auto flag : mask.flags) out << (flag ? '1' : '0') << '\n';
  if (!out) throw IoError("failed writing '" + output + "'");

  std::printf("N=%zu boundary=%llu elapsed_ms=%.3f\n", cloud.count(),
              static_cast<unsigned long long>(mask.count_true()), ms);
  return 0;
}

int run_eval(const std::string& gt_path, const std::string& pred_path,
             double radius, double theta, const std::string& groups_path,
             const std::string& derr_samples, const std::string& output,
             int workers) {
  auto [cloud, gt] = io::read_scene(gt_path);
  const LabelField pred = io::read_pred_labels(pred_path, cloud.count(), gt.ignore_label);

  ClassGroups groups;
  if (!groups_path.empty()) groups = io::read_groups(groups_path);

  std::int32_t max_label = 0;
  for (std::size_t i = 0; i < gt.count(); ++i) {
    if (!gt.is_ignored(i)) max_label = std::max(max_label, gt.labels[i]);
    max_label = std::max(max_label, pred.labels[i]);
  }
  for (const auto& [name, ids] : groups.groups) {
    for (const std::int32_t id : ids) max_label = std::max(max_label, id);
  }

  EvalConfig cfg;
  cfg.radius_m = radius;
  cfg.iou_threshold = theta;
  cfg.num_classes = max_label + 1;
  cfg.ignore_label = gt.ignore_label;
  if (derr_samples == "class") {
    cfg.derr_samples = DerrSamples::kClassMask;
  } else if (derr_samples == "component") {
    cfg.derr_samples = DerrSamples::kComponent;
  } else {
    throw ValidationError("--derr-samples must be 'class' or 'component'");
  }

  const MetricsReport report = evaluate_scene(cloud, gt, pred, cfg, groups, workers);
  io::write_report(output, report);

  const std::string suffix = theta_suffix(theta);
  std::printf("mIoU      %s\n", format_value(report.miou).c_str());
  std::printf("mAcc      %s\n", format_value(report.macc).c_str());
  std::printf("oAcc      %s\n", format_value(report.oacc).c_str());
  std::printf("FErr      %s\n", format_value(report.ferr).c_str());
  std::printf("MErr      %s\n", format_value(report.merr).c_str());
  std::printf("RErr_%s  %s\n", suffix.c_str(), format_value(report.rerr).c_str());
  std::printf("DErr_%s  %s\n", suffix.c_str(), format_value(report.derr).c_str());
  for (const auto& [name, value] : report.group_iou) {
    std::printf("IoU[%s]  %s\n", name.c_str(), format_value(value).c_str());
  }
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_path,
              const std::string& corrupt, double magnitude, std::uint64_t seed,
              const std::string& out_pred) {
  const SceneSpec spec = io::read_scene_spec(spec_path);
  const Scene scene = generate_scene(spec);
  io::write_scene(out_path, scene.cloud, scene.labels,
                  io::PlyFormat::kBinaryLittleEndian);
  std::printf("scene: %zu points -> %s\n", scene.cloud.count(), out_path.c_str());

  if (!corrupt.empty()) {
    if (out_pred.empty()) {
      throw ValidationError("--corrupt requires --out-pred");
    }
    const CorruptMode mode = parse_corrupt_mode(corrupt);
    const LabelField pred =
        corrupt_labels(scene.labels, scene.cloud, mode, magnitude, seed);
    std::ofstream out(out_pred, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + out_pred + "' for writing");
    for (const auto label : pred.labels) out << label << '\n';
    if (!out) throw IoError("failed writing '" + out_pred + "'");
    std::printf("prediction (%s, magnitude %g, seed %llu) -> %s\n", corrupt.c_str(),
                magnitude, static_cast<unsigned long long>(seed), out_pred.c_str());
  }
  return 0;
}

int run_bench(std::uint64_t n, double radius, const std::string& method_name,
              int repeat, int workers, const std::string& out_path) {
  const BenchMethod method = parse_bench_method(method_name);
  verify_bench_correctness(radius, workers, std::min<std::uint64_t>(n, 3000));
  const BenchResult result =
      run_boundary_bench(method, n, radius, repeat, workers);
  write_bench_results(out_path, {result});
  std::printf("%s n=%llu r=%g reps=%d mean_ms=%.3f median_ms=%.3f throughput=%.0f pts/s\n",
              result.method.c_str(), static_cast<unsigned long long>(result.points),
              result.radius_m, result.repetitions, result.mean_ms, result.median_ms,
              result.throughput_pts_per_s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point-cloud segmentation error analysis toolkit"};
  app.require_subcommand(1);

  auto* boundaries = app.add_subcommand(
      "boundaries", "Compute boundary pseudo-labels for a scene");
  std::string b_input, b_output;
  double b_radius = 0.06;
  int b_workers = 0;
  boundaries->add_option("--input", b_input, "Scene PLY")->required();
  boundaries->add_option("--radius", b_radius, "Neighborhood radius, meters");
  boundaries->add_option("--output", b_output, "Mask file (one 0/1 per line)")->required();
  boundaries->add_option("--workers", b_workers, "Worker threads (0 = hardware)");

  auto* eval = app.add_subcommand("eval", "Evaluate a prediction against a scene");
  std::string e_gt, e_pred, e_groups, e_output;
  std::string e_derr_samples = "class";
  double e_radius = 0.06, e_theta = 0.5;
  int e_workers = 0;
  eval->add_option("--gt", e_gt, "Ground-truth scene PLY")->required();
  eval->add_option("--pred", e_pred, "Predicted labels, one per line")->required();
  eval->add_option("--radius", e_radius, "Boundary radius, meters");
  eval->add_option("--iou-thresh", e_theta, "Sample qualification threshold");
  eval->add_option("--groups", e_groups, "Class groups JSON");
  eval->add_option("--derr-samples", e_derr_samples, "DErr samples: class|component");
  eval->add_option("--output", e_output, "Report JSON")->required();
  eval->add_option("--workers", e_workers, "Worker threads (0 = hardware)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  std::string s_spec, s_out, s_corrupt, s_out_pred;
  double s_magnitude = 0.04;
  std::uint64_t s_seed = 1;
  synth->add_option("--spec", s_spec, "Scene spec JSON")->required();
  synth->add_option("--out", s_out, "Output scene PLY")->required();
  synth->add_option("--corrupt", s_corrupt,
                    "Corruption mode: region-swap|dilate|erode|merge|speckle");
  synth->add_option("--magnitude", s_magnitude, "Corruption magnitude, meters");
  synth->add_option("--seed", s_seed, "Corruption seed");
  synth->add_option("--out-pred", s_out_pred, "Corrupted prediction labels file");

  auto* bench = app.add_subcommand("bench", "Time boundary pseudo-label methods");
  std::uint64_t n = 100000;
  double bench_radius = 0.06;
  std::string method = "grid", bench_out;
  int repeat = 5, bench_workers = 0;
  bench->add_option("--n", n, "Scene size in points")->required();
  bench->add_option("--radius", bench_radius, "Neighborhood radius, meters");
  bench->add_option("--method", method, "grid|brute")->required();
  bench->add_option("--repeat", repeat, "Timed repetitions after one warm-up");
  bench->add_option("--workers", bench_workers, "Worker threads (0 = hardware)");
  bench->add_option("--out", bench_out, "Results JSON")->required();

  try {
    app.parse(argc, argv);
    if (boundaries->parsed()) {
      return run_boundaries(b_input, b_radius, b_output, b_workers);
    }
    if (eval->parsed()) {
      return run_eval(e_gt, e_pred, e_radius, e_theta, e_groups, e_derr_samples,
                      e_output, e_workers);
    }
    if (synth->parsed()) {
      return run_synth(s_spec, s_out, s_corrupt, s_magnitude, s_seed, s_out_pred);
    }
    if (bench->parsed()) {
      return run_bench(n, bench_radius, method, repeat, bench_workers, bench_out);
    }
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
