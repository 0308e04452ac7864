#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stringlab/kernel.hpp"
#include "stringlab/sampler.hpp"
#include "stringlab/stats.hpp"

namespace stringlab {

struct EstimateCI {
  double estimate = 0.0;
  std::size_t replicates = 0;
  double stderr_ = 0.0;
  Interval ci95{0.0, 0.0};
  std::uint64_t seed = 0;
};

// P(U_t(x) in B_delta(0)) = (2 Phi(delta/sigma) - 1)^d with sigma^2 = cov(p,p).
// delta <= 0 returns 0 (degenerate box); the pinned origin returns 1.
double small_ball_exact(const SpaceTimePoint& p, double delta, int d);

// small-ball probability over the closed-form ceiling (delta/(t^{1/2}+|x|)^{1/2})^d
double prop12_ratio(const SpaceTimePoint& p, double delta, int d);

// P(U_p in B_d1(0), U_q in B_d2(0)) via the bivariate rectangle probability
double two_point_exact(const SpaceTimePoint& p, const SpaceTimePoint& q,
                       double d1, double d2, int d);

enum class BoundKind { lemma41, lemmaA1 };

struct SweepRow {
  double t = 0, s = 0, x = 0, y = 0, delta1 = 0, delta2 = 0;
  double lhs = 0, rhs = 0, ratio = 0;
};

struct BoundReport {
  std::string bound_name;
  std::string sweep_desc;
  double max_ratio = 0.0;
  SweepRow argmax;
  std::vector<SweepRow> table;
  std::size_t skipped = 0;
};

struct SweepGrid {
  int nt = 5, ns = 5, nx = 5, ny = 5;
};

// Ratio tables for the two-point bounds. lemma41 sweeps points satisfying the
// bound's admissible conditions with radii delta*t^{-alpha}; lemmaA1 sweeps
// the unit-scale box [1,2]^2 x [-2,2]^2 with fixed radii delta1, delta2.
BoundReport bound_ratio_sweep(BoundKind kind, double alpha, double delta1,
                              double delta2, const SweepGrid& grid);

enum class EventMode { all, any };

// Monte Carlo probability that (all | any) of the points land in their boxes
// B_{r_i}(0) in R^d. Radius +infinity means the point always qualifies.
// Replicate i draws from stream (seed, i); results are independent of the
// worker count.
EstimateCI mc_event_prob(std::span<const SpaceTimePoint> points, int d,
                         std::span<const double> radii, EventMode mode,
                         std::size_t reps, std::uint64_t seed, int workers = 1);

struct SupTailRow {
  double delta = 0.0;
  EstimateCI prob;
  bool used_in_fit = false;
};

struct SupTailFit {
  std::vector<SupTailRow> table;
  double c2 = 0.0;
  double r2 = 0.0;
  std::size_t grid_points = 0;
};

// Tail of sup over the resolution-grid of [0,1]^2 of |U_t(x)| (single
// component), with the least-squares fit of log p against delta^2.
SupTailFit sup_tail_fit(std::span<const double> deltas, double resolution,
                        std::size_t reps, std::uint64_t seed, int workers = 1);

struct ScaledInfQuantiles {
  double t = 0.0;
  double l_window = 0.0;
  double resolution = 0.0;
  int d = 7;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<QuantileEstimate> quantiles;  // 5/25/50/75/95 percent
};

// Quantiles of inf over |x| <= L*sqrt(t) (grid step resolution*sqrt(t)) of
// |U_t(x)| / t^{1/4}, the scale-invariant escape statistic.
ScaledInfQuantiles inf_scaled_quantiles(double t, double l_window,
                                        double resolution, std::size_t reps,
                                        std::uint64_t seed, int workers = 1,
                                        int d = 7);

// Residual variance of U_{t+s}(0) after conditioning on the time-t grid
// {(t, k*spacing) : |k*spacing| <= window}.
double conv_conditional_variance(double t, double s, double window,
                                 double spacing);

}  // namespace stringlab
