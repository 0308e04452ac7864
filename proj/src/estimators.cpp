#include "stringlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stringlab/parallel.hpp"
#include "stringlab/rng.hpp"

namespace stringlab {

namespace {

EstimateCI frequency_ci(std::size_t hits, std::size_t reps, std::uint64_t seed) {
  EstimateCI e;
  e.replicates = reps;
  e.seed = seed;
  const double n = static_cast<double>(reps);
  e.estimate = static_cast<double>(hits) / n;
  if (hits == 0) {
    e.stderr_ = 0.0;
    e.ci95 = {0.0, 3.0 / n};  // rule of three
  } else if (hits == reps) {
    e.stderr_ = 0.0;
    e.ci95 = {1.0 - 3.0 / n, 1.0};
  } else {
    e.stderr_ = std::sqrt(e.estimate * (1.0 - e.estimate) / n);
    e.ci95 = {std::max(0.0, e.estimate - 1.96 * e.stderr_),
              std::min(1.0, e.estimate + 1.96 * e.stderr_)};
  }
  return e;
}

}  // namespace

double small_ball_exact(const SpaceTimePoint& p, double delta, int d) {
  if (d < 1) throw std::invalid_argument("small_ball_exact: d must be positive");
  if (!(delta > 0.0)) return 0.0;
  const double var = cov(p, p);
  if (var <= 0.0) return 1.0;  // pinned origin: the zero vector is in the box
  const double per_component = 2.0 * normal_cdf(delta / std::sqrt(var)) - 1.0;
  return std::pow(per_component, d);
}

double prop12_ratio(const SpaceTimePoint& p, double delta, int d) {
  if (p.t == 0.0 && p.x == 0.0)
    throw std::invalid_argument("prop12_ratio: requires (t, x) != (0, 0)");
  if (!(delta > 0.0))
    throw std::invalid_argument("prop12_ratio: delta must be positive");
  const double envelope =
      std::pow(delta / std::sqrt(std::sqrt(p.t) + std::abs(p.x)), d);
  return small_ball_exact(p, delta, d) / envelope;
}

double two_point_exact(const SpaceTimePoint& p, const SpaceTimePoint& q,
                       double d1, double d2, int d) {
  if (d < 1) throw std::invalid_argument("two_point_exact: d must be positive");
  if (!(d1 > 0.0) || !(d2 > 0.0)) return 0.0;
  Matrix sigma(2, 2);
  sigma(0, 0) = cov(p, p);
  sigma(1, 1) = cov(q, q);
  sigma(0, 1) = sigma(1, 0) = cov(p, q);
  const double rect =
      bivariate_rect({0.0, 0.0}, sigma, Interval{-d1, d1}, Interval{-d2, d2});
  return std::pow(rect, d);
}

BoundReport bound_ratio_sweep(BoundKind kind, double alpha, double delta1,
                              double delta2, const SweepGrid& grid) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("bound_ratio_sweep: alpha must be positive");
  if (!(delta1 > 0.0 && delta1 < 1.0))
    throw std::invalid_argument("bound_ratio_sweep: delta must lie in (0,1)");
  BoundReport rep;
  rep.max_ratio = -1.0;

  auto consider = [&](SweepRow row) {
    rep.table.push_back(row);
    if (row.ratio > rep.max_ratio) {
      rep.max_ratio = row.ratio;
      rep.argmax = row;
    }
  };

  if (kind == BoundKind::lemma41) {
    // d = 6; points (t,x) and (t+s, x+y) with radii delta*t^-alpha,
    // delta*(t+s)^-alpha; admissible if t>=1,|x|,|y|<=2sqrt(t),0<=s<=t
    // or |y| <= 2 sqrt(s).
    rep.bound_name = "lemma41";
    rep.sweep_desc = "t in [1,4]; s = frac*t, frac in [0,2]; x,y = xi*2sqrt(t)";
    for (int it = 0; it < grid.nt; ++it) {
      const double t = 1.0 + 3.0 * it / std::max(1, grid.nt - 1);
      for (int is = 0; is < grid.ns; ++is) {
        const double s = t * (2.0 * is / std::max(1, grid.ns - 1));
        for (int ix = 0; ix < grid.nx; ++ix) {
          const double x =
              2.0 * std::sqrt(t) * (-1.0 + 2.0 * ix / std::max(1, grid.nx - 1));
          for (int iy = 0; iy < grid.ny; ++iy) {
            const double y = 2.0 * std::sqrt(t) *
                             (-1.0 + 2.0 * iy / std::max(1, grid.ny - 1));
            const bool cond1 = t >= 1.0 && std::abs(x) <= 2.0 * std::sqrt(t) &&
                               std::abs(y) <= 2.0 * std::sqrt(t) && s >= 0.0 &&
                               s <= t;
            const bool cond2 = std::abs(y) <= 2.0 * std::sqrt(s);
            const double denom = std::pow(std::sqrt(s) + std::abs(y), 3) *
                                 std::pow(std::sqrt(t) + std::abs(x), 3);
            if ((!cond1 && !cond2) || denom == 0.0) {
              ++rep.skipped;
              continue;
            }
            SweepRow row;
            row.t = t;
            row.s = s;
            row.x = x;
            row.y = y;
            row.delta1 = delta1 * std::pow(t, -alpha);
            row.delta2 = delta1 * std::pow(t + s, -alpha);
            row.lhs = two_point_exact(SpaceTimePoint(t, x),
                                      SpaceTimePoint(t + s, x + y), row.delta1,
                                      row.delta2, 6);
            row.rhs = std::pow(t + s, -6.0 * alpha) * std::pow(t, -6.0 * alpha) /
                      denom;
            row.ratio = row.lhs / row.rhs;
            consider(row);
          }
        }
      }
    }
  } else {
    if (!(delta2 > 0.0 && delta2 < 1.0))
      throw std::invalid_argument("bound_ratio_sweep: delta2 must lie in (0,1)");
    rep.bound_name = "lemmaA1";
    rep.sweep_desc = "s,t in [1,2]; x,y in [-2,2]; unit-scale radii";
    for (int it = 0; it < grid.nt; ++it) {
      const double t = 1.0 + 1.0 * it / std::max(1, grid.nt - 1);
      for (int is = 0; is < grid.ns; ++is) {
        const double s = 1.0 + 1.0 * is / std::max(1, grid.ns - 1);
        for (int ix = 0; ix < grid.nx; ++ix) {
          const double x = -2.0 + 4.0 * ix / std::max(1, grid.nx - 1);
          for (int iy = 0; iy < grid.ny; ++iy) {
            const double y = -2.0 + 4.0 * iy / std::max(1, grid.ny - 1);
            const double sep = std::sqrt(std::abs(t - s)) + std::abs(x - y);
            if (sep == 0.0) {
              ++rep.skipped;
              continue;
            }
            SweepRow row;
            row.t = t;
            row.s = s;
            row.x = x;
            row.y = y;
            row.delta1 = delta1;
            row.delta2 = delta2;
            row.lhs = two_point_exact(SpaceTimePoint(t, x), SpaceTimePoint(s, y),
                                      delta1, delta2, 6);
            row.rhs = std::pow(delta1, 6) * std::pow(delta2, 6) / std::pow(sep, 3);
            row.ratio = row.lhs / row.rhs;
            consider(row);
          }
        }
      }
    }
  }
  if (rep.table.empty())
    throw std::invalid_argument("bound_ratio_sweep: empty legal sweep");
  return rep;
}

EstimateCI mc_event_prob(std::span<const SpaceTimePoint> points, int d,
                         std::span<const double> radii, EventMode mode,
                         std::size_t reps, std::uint64_t seed, int workers) {
  if (points.size() != radii.size())
    throw std::invalid_argument("mc_event_prob: radii count mismatch");
  if (reps < 100) throw std::invalid_argument("mc_event_prob: reps < 100");
  if (d < 1) throw std::invalid_argument("mc_event_prob: d must be positive");
  for (double r : radii)
    if (std::isnan(r) || r < 0.0)
      throw std::invalid_argument("mc_event_prob: invalid radius");

  const FieldFactor factor(points, workers);
  const std::size_t n = points.size();
  std::vector<std::uint8_t> hit(reps, 0);
  parallel_for(reps, workers, [&](std::size_t rep) {
    Rng rng(derive_stream(seed, rep));
    std::vector<double> col(n);
    std::vector<std::uint8_t> in_box(n, 1);
    for (int c = 0; c < d; ++c) {
      factor.draw(rng, col);
      for (std::size_t i = 0; i < n; ++i)
        in_box[i] = in_box[i] && std::abs(col[i]) < radii[i];
    }
    bool event = mode == EventMode::all;
    for (std::size_t i = 0; i < n; ++i) {
      if (mode == EventMode::all)
        event = event && in_box[i];
      else
        event = event || in_box[i];
    }
    hit[rep] = event ? 1 : 0;
  });
  std::size_t hits = 0;
  for (std::uint8_t h : hit) hits += h;
  return frequency_ci(hits, reps, seed);
}

SupTailFit sup_tail_fit(std::span<const double> deltas, double resolution,
                        std::size_t reps, std::uint64_t seed, int workers) {
  if (!(resolution > 0.0) || resolution > 0.1 + 1e-12)
    throw std::invalid_argument("sup_tail_fit: resolution must be in (0, 0.1]");
  const long cells = std::lround(1.0 / resolution);
  if (std::abs(cells * resolution - 1.0) > 1e-9)
    throw std::invalid_argument("sup_tail_fit: resolution must divide 1");
  for (double dl : deltas)
    if (dl < 0.0) throw std::invalid_argument("sup_tail_fit: delta < 0");

  std::vector<SpaceTimePoint> grid;
  grid.reserve(static_cast<std::size_t>((cells + 1) * (cells + 1)));
  for (long i = 0; i <= cells; ++i)
    for (long j = 0; j <= cells; ++j)
      grid.emplace_back(i * resolution, j * resolution);

  const FieldFactor factor(grid, workers);
  std::vector<double> sups(reps);
  parallel_for(reps, workers, [&](std::size_t rep) {
    Rng rng(derive_stream(seed, rep));
    std::vector<double> col(grid.size());
    factor.draw(rng, col);
    double m = 0.0;
    for (double v : col) m = std::max(m, std::abs(v));
    sups[rep] = m;
  });

  SupTailFit fit;
  fit.grid_points = grid.size();
  std::vector<double> xs, ys;
  for (double dl : deltas) {
    std::size_t hits = 0;
    for (double s : sups)
      if (s >= dl) ++hits;
    SupTailRow row;
    row.delta = dl;
    row.prob = frequency_ci(hits, reps, seed);
    row.used_in_fit =
        row.prob.estimate >= 10.0 / static_cast<double>(reps);
    if (row.used_in_fit) {
      xs.push_back(dl * dl);
      ys.push_back(std::log(row.prob.estimate));
    }
    fit.table.push_back(row);
  }
  if (xs.size() >= 2) {
    const LinearFit lf = least_squares(xs, ys);
    fit.c2 = -lf.slope;
    fit.r2 = lf.r2;
  }
  return fit;
}

ScaledInfQuantiles inf_scaled_quantiles(double t, double l_window,
                                        double resolution, std::size_t reps,
                                        std::uint64_t seed, int workers, int d) {
  if (!(t > 0.0)) throw std::invalid_argument("inf_scaled_quantiles: t <= 0");
  if (!(l_window > 0.0))
    throw std::invalid_argument("inf_scaled_quantiles: window <= 0");
  if (d < 1) throw std::invalid_argument("inf_scaled_quantiles: d < 1");
  if (resolution * std::sqrt(t) > 0.1 * std::pow(t, 0.25) + 1e-12)
    throw std::invalid_argument(
        "inf_scaled_quantiles: grid too coarse for the field scale");

  const double h = resolution * std::sqrt(t);
  const long jmax = static_cast<long>(std::floor(l_window / resolution + 1e-9));
  std::vector<SpaceTimePoint> grid;
  for (long j = -jmax; j <= jmax; ++j) grid.emplace_back(t, j * h);

  const FieldFactor factor(grid, workers);
  const double scale = std::pow(t, 0.25);
  std::vector<double> stats(reps);
  parallel_for(reps, workers, [&](std::size_t rep) {
    Rng rng(derive_stream(seed, rep));
    std::vector<double> col(grid.size());
    std::vector<double> norm2(grid.size(), 0.0);
    for (int c = 0; c < d; ++c) {
      factor.draw(rng, col);
      for (std::size_t i = 0; i < grid.size(); ++i) norm2[i] += col[i] * col[i];
    }
    double best = norm2[0];
    for (double v : norm2) best = std::min(best, v);
    stats[rep] = std::sqrt(best) / scale;
  });

  ScaledInfQuantiles out;
  out.t = t;
  out.l_window = l_window;
  out.resolution = resolution;
  out.d = d;
  out.replicates = reps;
  out.seed = seed;
  const double levels[] = {0.05, 0.25, 0.50, 0.75, 0.95};
  out.quantiles = quantiles_with_stderr(std::move(stats), levels);
  return out;
}

double conv_conditional_variance(double t, double s, double window,
                                 double spacing) {
  if (!(s > 0.0)) throw std::invalid_argument("conv_conditional_variance: s <= 0");
  if (spacing > 0.2 + 1e-12)
    throw std::invalid_argument("conv_conditional_variance: spacing > 0.2");
  if (window < 10.0 * std::sqrt(s) - 1e-9)
    throw std::invalid_argument(
        "conv_conditional_variance: window below 10*sqrt(s)");
  const long k = static_cast<long>(std::floor(window / spacing + 1e-9));
  std::vector<SpaceTimePoint> pts;
  pts.emplace_back(t + s, 0.0);
  for (long i = -k; i <= k; ++i) pts.emplace_back(t, i * spacing);
  const CovarianceMatrix m = cov_matrix(pts);
  std::vector<std::size_t> observed(pts.size() - 1);
  for (std::size_t i = 0; i < observed.size(); ++i) observed[i] = i + 1;
  const GaussianConditioning gc = condition_on(m, observed);
  return gc.residual_cov(0, 0);
}

}  // namespace stringlab
