// Serial / OpenMP comparison for the data-parallel kernels: covariance
// assembly, Monte Carlo event probability, sup-tail replicates, SPDE
// replicate batches. The workers=1 path is the plain serial loop.

#include <chrono>
#include <cstdio>
#include <vector>

#include "stringlab/estimators.hpp"
#include "stringlab/kernel.hpp"
#include "stringlab/parallel.hpp"
#include "stringlab/rng.hpp"
#include "stringlab/spde.hpp"

using namespace stringlab;

namespace {

double seconds_of(auto&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<SpaceTimePoint> make_points(std::size_t n) {
  Rng rng(7);
  std::vector<SpaceTimePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.emplace_back(4.0 * rng.uniform(), 8.0 * rng.uniform() - 4.0);
  return pts;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx\n", name,
              serial, parallel, serial / parallel);
}

}  // namespace

int main() {
  const int workers = resolve_workers(0);
  std::printf("workers: %d\n", workers);

  double sink = 0.0;
  {
    const auto pts = make_points(1200);
    const double ts = seconds_of([&] { sink += cov_matrix_serial(pts).entries(0, 0); });
    const double tp = seconds_of([&] { sink += cov_matrix(pts, workers).entries(0, 0); });
    report("cov_matrix n=1200", ts, tp);
  }

  {
    const auto pts = make_points(24);
    const std::vector<double> radii(pts.size(), 0.8);
    const double ts = seconds_of([&] {
      mc_event_prob(pts, 6, radii, EventMode::any, 40000, 11, 1);
    });
    const double tp = seconds_of([&] {
      mc_event_prob(pts, 6, radii, EventMode::any, 40000, 11, workers);
    });
    report("mc_event_prob 4e4 reps", ts, tp);
  }

  {
    const double deltas[] = {1.0, 2.0, 3.0};
    const double ts = seconds_of([&] { sup_tail_fit(deltas, 0.1, 20000, 3, 1); });
    const double tp =
        seconds_of([&] { sup_tail_fit(deltas, 0.1, 20000, 3, workers); });
    report("sup_tail_fit 2e4 reps", ts, tp);
  }

  {
    auto batch = [&](int w) {
      std::vector<double> out(32);
      parallel_for(32, w, [&](std::size_t r) {
        SpdeConfig c;
        c.dx = 0.1;
        c.dt = 0.005;
        c.window = 10.0;
        c.horizon = 0.5;
        c.d = 2;
        c.seed = derive_stream(5, r);
        const double snap[] = {0.5};
        out[r] = simulate(c, snap).values[0](0, 0);
      });
      return out[0];
    };
    const double ts = seconds_of([&] { sink += batch(1); });
    const double tp = seconds_of([&] { sink += batch(workers); });
    report("spde batch 32 trajectories", ts, tp);
  }
  return sink == -1.0 ? 1 : 0;
}
