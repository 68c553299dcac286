#include "segerr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "segerr/boundary.hpp"
#include "segerr/errors.hpp"
#include "segerr/parallel.hpp"

#include <fstream>

namespace segerr {

namespace {

// Sampling density of the synthetic benchmark room, points per cubic meter.
// Keeping density fixed makes the grid workload scale linearly with N.
constexpr double kBenchDensity = 33000.0;

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(end - start).count();
}

}  // namespace

BenchMethod parse_bench_method(const std::string& name) {
  if (name == "grid") return BenchMethod::kGrid;
  if (name == "brute") return BenchMethod::kBrute;
  throw ValidationError("unknown benchmark method '" + name + "'");
}

std::string bench_method_name(BenchMethod method) {
  return method == BenchMethod::kGrid ? "grid" : "brute";
}

Scene make_bench_scene(std::uint64_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("benchmark scene needs at least one point");
  const double volume = static_cast<double>(n) / kBenchDensity;
  const double lz = std::cbrt(volume / 4.0);  // room-like aspect: x = y = 2z
  SceneSpec spec;
  spec.kind = SceneKind::kRandomBlobs;
  spec.count = n;
  spec.extents = {2.0 * lz, 2.0 * lz, lz};
  spec.num_blobs = 24;
  spec.num_classes = 8;
  spec.seed = seed;
  return generate_scene(spec);
}

void verify_bench_correctness(double radius_m, int workers,
                              std::uint64_t gate_points) {
  const Scene scene = make_bench_scene(gate_points, /*seed=*/7);
  const BoundaryMask grid_mask =
      compute_boundary_mask(scene.cloud, scene.labels, radius_m, workers);
  const BoundaryMask brute_mask =
      compute_boundary_mask_brute(scene.cloud, scene.labels, radius_m, workers);
  if (grid_mask.flags != brute_mask.flags) {
    throw InternalError("grid and brute boundary masks disagree on the gate scene");
  }
}

BenchResult run_boundary_bench(BenchMethod method, std::uint64_t n,
                               double radius_m, int repetitions, int workers,
                               std::uint64_t seed) {
  if (n < 1000) throw ValidationError("benchmark needs at least 1000 points");
  if (repetitions < 3) throw ValidationError("benchmark needs at least 3 repetitions");
  if (!(radius_m > 0.0)) throw ValidationError("radius must be positive");

  const Scene scene = make_bench_scene(n, seed);
  const auto run = [&] {
    if (method == BenchMethod::kGrid) {
      return compute_boundary_mask(scene.cloud, scene.labels, radius_m, workers);
    }
    return compute_boundary_mask_brute(scene.cloud, scene.labels, radius_m, workers);
  };

  BenchResult result;
  result.method = bench_method_name(method);
  result.points = n;
  result.radius_m = radius_m;
  result.workers = static_cast<int>(resolve_workers(workers));
  result.repetitions = repetitions;

  volatile std::uint64_t sink = run().count_true();  // warm-up
  (void)sink;
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    const BoundaryMask mask = run();
    result.times_ms.push_back(elapsed_ms(start));
    sink = mask.count_true();
  }

  std::vector<double> sorted = result.times_ms;
  std::sort(sorted.begin(), sorted.end());
  result.median_ms = repetitions % 2 == 1
                         ? sorted[repetitions / 2]
                         : 0.5 * (sorted[repetitions / 2 - 1] + sorted[repetitions / 2]);
  double total = 0.0;
  for (const double t : result.times_ms) total += t;
  result.mean_ms = total / repetitions;
  result.throughput_pts_per_s =
      result.mean_ms > 0.0 ? static_cast<double>(n) / (result.mean_ms / 1000.0) : 0.0;
  return result;
}

void write_bench_results(const std::string& path,
                         const std::vector<BenchResult>& results) {
  nlohmann::json doc;
  doc["format"] = "segerr-bench-v1";
  doc["results"] = nlohmann::json::array();
  for (const auto& r : results) {
    doc["results"].push_back({
        {"method", r.method},
        {"points", r.points},
        {"radius_m", r.radius_m},
        {"workers", r.workers},
        {"repetitions", r.repetitions},
        {"times_ms", r.times_ms},
        {"mean_ms", r.mean_ms},
        {"median_ms", r.median_ms},
        {"throughput_pts_per_s", r.throughput_pts_per_s},
    });
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace segerr
