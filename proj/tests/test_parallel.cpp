// The workers=1 serial path is the reference; every parallel result must be
// bit-identical to it.
#include <doctest.h>

#include <vector>

#include "stringlab/constructions.hpp"
#include "stringlab/estimators.hpp"
#include "stringlab/kernel.hpp"
#include "stringlab/rng.hpp"

using namespace stringlab;

namespace {
std::vector<SpaceTimePoint> some_points(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SpaceTimePoint> pts;
  for (std::size_t i = 0; i < n; ++i)
    pts.emplace_back(4 * rng.uniform(), 8 * rng.uniform() - 4);
  return pts;
}
}  // namespace

TEST_CASE("cov_matrix: parallel equals the serial reference") {
  const auto pts = some_points(120, 1);
  const CovarianceMatrix serial = cov_matrix_serial(pts);
  const CovarianceMatrix parallel = cov_matrix(pts, 8);
  CHECK(serial.entries.data() == parallel.entries.data());
}

TEST_CASE("mc_event_prob is independent of the worker count") {
  const auto pts = some_points(10, 2);
  const std::vector<double> radii(pts.size(), 0.7);
  const EstimateCI a = mc_event_prob(pts, 4, radii, EventMode::any, 4000, 99, 1);
  const EstimateCI b = mc_event_prob(pts, 4, radii, EventMode::any, 4000, 99, 7);
  CHECK(a.estimate == b.estimate);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("sup_tail_fit is independent of the worker count") {
  const double deltas[] = {0.5, 1.0, 1.5};
  const SupTailFit a = sup_tail_fit(deltas, 0.1, 3000, 4, 1);
  const SupTailFit b = sup_tail_fit(deltas, 0.1, 3000, 4, 6);
  CHECK(a.c2 == b.c2);
  CHECK(a.r2 == b.r2);
  for (std::size_t i = 0; i < a.table.size(); ++i)
    CHECK(a.table[i].prob.estimate == b.table[i].prob.estimate);
}

TEST_CASE("inf_scaled_quantiles is independent of the worker count") {
  const ScaledInfQuantiles a = inf_scaled_quantiles(1.0, 1.0, 0.1, 500, 5, 1, 7);
  const ScaledInfQuantiles b = inf_scaled_quantiles(1.0, 1.0, 0.1, 500, 5, 5, 7);
  for (std::size_t i = 0; i < a.quantiles.size(); ++i)
    CHECK(a.quantiles[i].value == b.quantiles[i].value);
}

TEST_CASE("partial sums reduce deterministically") {
  const PartialSumTable a =
      grid_bound_partial_sum(SumKind::smallball, 0.125, 7, 0.9, 300, 300, 1.0, 1);
  const PartialSumTable b =
      grid_bound_partial_sum(SumKind::smallball, 0.125, 7, 0.9, 300, 300, 1.0, 8);
  CHECK(a.total == b.total);
  CHECK(a.cumulative_by_n == b.cumulative_by_n);
}
