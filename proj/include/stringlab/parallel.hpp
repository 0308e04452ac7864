#pragma once

#include <cstddef>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stringlab {

inline int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Data-parallel loop over [0, n). workers <= 1 runs the plain serial loop,
// which doubles as the reference implementation in tests and benchmarks.
// Callers write results into per-index slots so the output is bit-identical
// for every worker count.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  workers = resolve_workers(workers);
#ifdef _OPENMP
  if (workers > 1) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      fn(static_cast<std::size_t>(i));
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace stringlab
