#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace segerr {

inline unsigned resolve_workers(int workers) {
  if (workers > 0) return static_cast<unsigned>(workers);
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Fork-join over [0, n) in contiguous chunks, one per worker. Each worker may
// write only to slots inside its own range, so results never depend on the
// worker count.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const unsigned w = resolve_workers(workers);
  if (n == 0) return;
  if (w <= 1 || n < 2 * w) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + w - 1) / w;
  std::vector<std::thread> pool;
  pool.reserve(w - 1);
  std::size_t begin = chunk;  // chunk 0 runs on this thread
  for (unsigned t = 1; t < w && begin < n; ++t) {
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    begin = end;
  }
  fn(std::size_t{0}, std::min(n, chunk));
  for (auto& th : pool) th.join();
}

}  // namespace segerr
