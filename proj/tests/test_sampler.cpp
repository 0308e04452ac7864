#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stringlab/sampler.hpp"
#include "stringlab/stats.hpp"

using namespace stringlab;

TEST_CASE("pinned origin samples are exactly zero") {
  const std::vector<SpaceTimePoint> pts{SpaceTimePoint(0, 0)};
  const FieldSample s = sample_field(pts, 4, 9001);
  for (std::size_t c = 0; c < 4; ++c) CHECK(s.values(0, c) == 0.0);
}

TEST_CASE("single-point sample variance matches the kernel") {
  const std::vector<SpaceTimePoint> pts{SpaceTimePoint(1, 0)};
  const double target = cov(pts[0], pts[0]);
  const std::size_t reps = 100000;
  const FieldFactor factor(pts);
  std::vector<double> vals(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(derive_stream(333, r));
    double v;
    factor.draw(rng, {&v, 1});
    vals[r] = v;
  }
  const double v = sample_variance(vals);
  const double se = target * std::sqrt(2.0 / (reps - 1.0));
  CHECK(std::abs(v - target) <= 3 * se);

  const double ks = ks_statistic_normal(vals, std::sqrt(target));
  CHECK(ks <= ks_critical(reps, 0.01));
}

TEST_CASE("equal-time pair difference has variance |x - y|") {
  const std::vector<SpaceTimePoint> pts{SpaceTimePoint(2, 0), SpaceTimePoint(2, 3)};
  const FieldFactor factor(pts);
  const std::size_t reps = 100000;
  std::vector<double> diffs(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(derive_stream(17, r));
    double buf[2];
    factor.draw(rng, buf);
    diffs[r] = buf[1] - buf[0];
  }
  const double v = sample_variance(diffs);
  const double se = 3.0 * std::sqrt(2.0 / (reps - 1.0));
  CHECK(std::abs(v - 3.0) <= 3 * se);
}

TEST_CASE("seed determinism and caller-order preservation") {
  std::vector<SpaceTimePoint> pts;
  Rng rng(8);
  for (int i = 0; i < 12; ++i)
    pts.emplace_back(4 * rng.uniform(), 8 * rng.uniform() - 4);

  const FieldSample a = sample_field(pts, 3, 777);
  const FieldSample b = sample_field(pts, 3, 777);
  CHECK(a.values.data() == b.values.data());
  CHECK(a.rng_id == kRngId);

  // same set in a different order: same field values per point
  std::vector<SpaceTimePoint> shuffled(pts.rbegin(), pts.rend());
  const FieldSample c = sample_field(shuffled, 3, 777);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t comp = 0; comp < 3; ++comp)
      CHECK(a.values(i, comp) == c.values(pts.size() - 1 - i, comp));

  // extending d keeps earlier components
  const FieldSample d4 = sample_field(pts, 4, 777);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t comp = 0; comp < 3; ++comp)
      CHECK(a.values(i, comp) == d4.values(i, comp));
}

TEST_CASE("components are independent") {
  const std::vector<SpaceTimePoint> pts{SpaceTimePoint(1, 0)};
  const std::size_t reps = 10000;
  std::vector<double> c0(reps), c1(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const FieldSample s = sample_field(pts, 2, derive_stream(55, r));
    c0[r] = s.values(0, 0);
    c1[r] = s.values(0, 1);
  }
  const double m0 = mean(c0), m1 = mean(c1);
  double num = 0, d0 = 0, d1 = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    num += (c0[r] - m0) * (c1[r] - m1);
    d0 += (c0[r] - m0) * (c0[r] - m0);
    d1 += (c1[r] - m1) * (c1[r] - m1);
  }
  CHECK(std::abs(num / std::sqrt(d0 * d1)) <= 3.0 / std::sqrt(double(reps)));
}

TEST_CASE("translation invariance of increment variance") {
  // Var(U_{t0+t}(x0+x) - U_{t0}(x0)) = sq_dist((t,x),(0,0)) sampled jointly
  const std::vector<SpaceTimePoint> pts{SpaceTimePoint(2, 1), SpaceTimePoint(3, 2)};
  const double target = sq_dist(SpaceTimePoint(1, 1), SpaceTimePoint(0, 0));
  const FieldFactor factor(pts);
  const std::size_t reps = 20000;
  std::vector<double> diffs(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(derive_stream(91, r));
    double buf[2];
    factor.draw(rng, buf);
    diffs[r] = buf[1] - buf[0];
  }
  const double v = sample_variance(diffs);
  const double se = target * std::sqrt(2.0 / (reps - 1.0));
  CHECK(std::abs(v - target) <= 3 * se);
}

TEST_CASE("scale_points") {
  const std::vector<SpaceTimePoint> pts{SpaceTimePoint(1, 1)};
  const auto same = scale_points(pts, 1.0);
  CHECK(same[0].t == 1.0);
  CHECK(same[0].x == 1.0);
  const auto big = scale_points(pts, 2.0);
  CHECK(big[0].t == 16.0);
  CHECK(big[0].x == 4.0);
  CHECK_THROWS_AS(scale_points(pts, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_points(pts, -1.0), std::invalid_argument);
}
