#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stringlab/estimators.hpp"
#include "stringlab/rng.hpp"

using namespace stringlab;

TEST_CASE("small_ball_exact") {
  const SpaceTimePoint p(1, 0);
  CHECK(small_ball_exact(p, 1e9, 7) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(small_ball_exact(p, 0.0, 7) == 0.0);
  CHECK(small_ball_exact(p, -1.0, 7) == 0.0);
  CHECK(small_ball_exact(SpaceTimePoint(0, 0), 0.5, 3) == 1.0);
  CHECK(small_ball_exact(p, 0.5, 7) ==
        doctest::Approx(0.0024780303771820511).epsilon(1e-9));
}

TEST_CASE("prop12_ratio") {
  CHECK_THROWS_AS(prop12_ratio(SpaceTimePoint(0, 0), 0.5, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(prop12_ratio(SpaceTimePoint(1, 0), 0.0, 7),
                  std::invalid_argument);
  CHECK(prop12_ratio(SpaceTimePoint(1, 0), 0.5, 7) ==
        doctest::Approx(0.31718788827930254).epsilon(1e-9));
  CHECK(prop12_ratio(SpaceTimePoint(1, 2), 0.5, 7) ==
        prop12_ratio(SpaceTimePoint(1, -2), 0.5, 7));

  double worst = 0.0;
  for (int it = 0; it < 12; ++it)
    for (int ix = 0; ix < 12; ++ix)
      for (int id = 1; id <= 8; ++id)
        worst = std::max(worst,
                         prop12_ratio(SpaceTimePoint(1 + 99.0 * it / 11,
                                                     10.0 * ix / 11),
                                      id / 8.0, 7));
  CHECK(worst <= 3.0);
}

TEST_CASE("two_point_exact degenerate and independence limits") {
  const SpaceTimePoint p(1, 0);
  CHECK(std::abs(two_point_exact(p, p, 0.5, 0.5, 7) -
                 small_ball_exact(p, 0.5, 7)) < 1e-6);
  CHECK(two_point_exact(p, SpaceTimePoint(2, 1), 0.0, 0.5, 6) == 0.0);

  // far separation: joint probability factorizes within 1%
  const SpaceTimePoint a(1, -40), b(1, 40);
  const double joint = two_point_exact(a, b, 2.0, 2.0, 6);
  const double product = small_ball_exact(a, 2.0, 6) * small_ball_exact(b, 2.0, 6);
  CHECK(std::abs(joint / product - 1.0) < 0.01);
}

TEST_CASE("bound_ratio_sweep shapes and stability") {
  const SweepGrid grid{5, 5, 5, 5};
  const BoundReport r41 = bound_ratio_sweep(BoundKind::lemma41, 1.0, 0.5, 0.5, grid);
  CHECK(r41.max_ratio > 0.0);
  CHECK(std::isfinite(r41.max_ratio));
  for (const auto& row : r41.table) {
    CHECK(row.ratio > 0.0);
    CHECK(std::isfinite(row.ratio));
  }
  CHECK(r41.skipped > 0);  // the s=0, y=0 grid corner is degenerate

  const BoundReport rA1 =
      bound_ratio_sweep(BoundKind::lemmaA1, 1.0, 0.5, 0.5, grid);
  // single-configuration definition check
  const auto& row = rA1.table.front();
  const double direct =
      two_point_exact(SpaceTimePoint(row.t, row.x), SpaceTimePoint(row.s, row.y),
                      row.delta1, row.delta2, 6) /
      row.rhs;
  CHECK(row.ratio == doctest::Approx(direct).epsilon(1e-12));

  const SweepGrid fine{10, 10, 10, 10};
  const BoundReport rA1f =
      bound_ratio_sweep(BoundKind::lemmaA1, 1.0, 0.5, 0.5, fine);
  CHECK(std::abs(rA1f.max_ratio - rA1.max_ratio) / rA1.max_ratio < 0.10);

  CHECK_THROWS_AS(bound_ratio_sweep(BoundKind::lemma41, 1.0, 1.5, 0.5, grid),
                  std::invalid_argument);
}

TEST_CASE("mc_event_prob trivia and exact-formula agreement") {
  const std::vector<SpaceTimePoint> pts{SpaceTimePoint(1, 0), SpaceTimePoint(2, 1)};
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> open{inf, inf};
  const EstimateCI always = mc_event_prob(pts, 3, open, EventMode::all, 500, 7);
  CHECK(always.estimate == 1.0);
  CHECK(always.stderr_ == 0.0);

  const std::vector<SpaceTimePoint> one{SpaceTimePoint(1, 0)};
  const std::vector<double> zero{0.0};
  CHECK(mc_event_prob(one, 3, zero, EventMode::any, 500, 7).estimate == 0.0);

  CHECK_THROWS_AS(mc_event_prob(one, 3, zero, EventMode::any, 50, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_event_prob(pts, 3, zero, EventMode::any, 500, 7),
                  std::invalid_argument);

  const std::vector<double> half{0.5};
  const EstimateCI est =
      mc_event_prob(one, 7, half, EventMode::all, 100000, 12345);
  const double exact = small_ball_exact(one[0], 0.5, 7);
  CHECK(std::abs(est.estimate - exact) <= 3.0 * std::max(est.stderr_, 1e-5));
  CHECK(est.ci95.lo <= est.estimate);
  CHECK(est.ci95.hi >= est.estimate);
}

TEST_CASE("mc matches exact formulas on random configurations") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const SpaceTimePoint p(0.5 + 3 * rng.uniform(), 4 * rng.uniform() - 2);
    const SpaceTimePoint q(0.5 + 3 * rng.uniform(), 4 * rng.uniform() - 2);
    const double r1 = 0.3 + 1.5 * rng.uniform();
    const double r2 = 0.3 + 1.5 * rng.uniform();
    const int d = 1 + static_cast<int>(rng.uniform() * 4);
    const std::vector<SpaceTimePoint> pts{p, q};
    const std::vector<double> radii{r1, r2};
    const double exact = two_point_exact(p, q, r1, r2, d);
    const EstimateCI est = mc_event_prob(pts, d, radii, EventMode::all, 20000,
                                         derive_stream(606, trial));
    const double slack = 3.0 * std::max(est.stderr_, 3.0 / 20000.0);
    CHECK(std::abs(est.estimate - exact) <= slack);
  }
}

TEST_CASE("sup_tail_fit basics") {
  const double deltas[] = {0.0, 0.75, 1.5, 2.25};
  const SupTailFit fit = sup_tail_fit(deltas, 0.1, 4000, 555, 0);
  CHECK(fit.grid_points == 121);
  CHECK(fit.table[0].prob.estimate == 1.0);  // delta = 0
  for (std::size_t i = 1; i < fit.table.size(); ++i)
    CHECK(fit.table[i].prob.estimate <= fit.table[i - 1].prob.estimate);
  CHECK(fit.c2 > 0.0);

  CHECK_THROWS_AS(sup_tail_fit(deltas, 0.3, 4000, 1), std::invalid_argument);
  CHECK_THROWS_AS(sup_tail_fit(deltas, 0.07, 4000, 1), std::invalid_argument);
}

TEST_CASE("inf_scaled_quantiles shape and window monotonicity") {
  const ScaledInfQuantiles q =
      inf_scaled_quantiles(1.0, 1.0, 0.1, 400, 2718, 0, 7);
  CHECK(q.quantiles.size() == 5);
  double prev = -1.0;
  for (const auto& e : q.quantiles) {
    CHECK(e.value >= 0.0);
    CHECK(e.value >= prev);
    prev = e.value;
  }
  const ScaledInfQuantiles wide =
      inf_scaled_quantiles(1.0, 2.0, 0.1, 400, 2718, 0, 7);
  for (std::size_t i = 0; i < 5; ++i) {
    const double slack = 3.0 * std::sqrt(q.quantiles[i].stderr_ * q.quantiles[i].stderr_ +
                                         wide.quantiles[i].stderr_ * wide.quantiles[i].stderr_);
    CHECK(wide.quantiles[i].value <= q.quantiles[i].value + slack);
  }
  // grid too coarse relative to t^{1/4} scale
  CHECK_THROWS_AS(inf_scaled_quantiles(16.0, 1.0, 0.06, 100, 1, 0, 7),
                  std::invalid_argument);
}

TEST_CASE("conv_conditional_variance targets and monotonicity") {
  const double v1 = conv_conditional_variance(1.0, 1.0, 30.0, 0.1);
  CHECK(std::abs(v1 / 0.5641895835477563 - 1.0) < 0.05);
  const double v4 = conv_conditional_variance(1.0, 4.0, 30.0, 0.1);
  CHECK(std::abs(v4 / 1.1283791670955126 - 1.0) < 0.05);

  const double coarse = conv_conditional_variance(1.0, 1.0, 12.0, 0.2);
  const double fine = conv_conditional_variance(1.0, 1.0, 12.0, 0.1);
  CHECK(fine <= coarse + 1e-12);

  CHECK_THROWS_AS(conv_conditional_variance(1.0, 1.0, 30.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(conv_conditional_variance(1.0, 4.0, 12.0, 0.1),
                  std::invalid_argument);
}
