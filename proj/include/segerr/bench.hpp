#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segerr/synth.hpp"
#include "segerr/types.hpp"

namespace segerr {

enum class BenchMethod { kGrid, kBrute };

BenchMethod parse_bench_method(const std::string& name);
std::string bench_method_name(BenchMethod method);

struct BenchResult {
  std::string method;
  std::uint64_t points = 0;
  double radius_m = 0.0;
  int workers = 0;
  int repetitions = 0;
  std::vector<double> times_ms;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double throughput_pts_per_s = 0.0;
};

/// Room-like random multi-label scene at a fixed sampling density, so the
/// workload grows linearly with the point count.
Scene make_bench_scene(std::uint64_t n, std::uint64_t seed = 42);

/// Grid and brute boundary masks must agree on a small seeded scene before
/// any timing is trusted; throws InternalError otherwise.
void verify_bench_correctness(double radius_m, int workers,
                              std::uint64_t gate_points = 3000);

/// Times boundary pseudo-label computation (grid build included) over
/// `repetitions` runs after one warm-up.
BenchResult run_boundary_bench(BenchMethod method, std::uint64_t n,
                               double radius_m, int repetitions, int workers,
                               std::uint64_t seed = 42);

void write_bench_results(const std::string& path,
                         const std::vector<BenchResult>& results);

}  // namespace segerr
