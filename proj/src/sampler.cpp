#include "stringlab/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace stringlab {

FieldFactor::FieldFactor(std::span<const SpaceTimePoint> points, int workers) {
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (points[a].t != points[b].t) return points[a].t < points[b].t;
                     return points[a].x < points[b].x;
                   });
  std::vector<SpaceTimePoint> sorted;
  sorted.reserve(points.size());
  for (std::size_t idx : order_) sorted.push_back(points[idx]);
  factor_ = factorize(cov_matrix(sorted, workers), workers);
}

void FieldFactor::draw(Rng& rng, std::span<double> out) const {
  const std::size_t n = order_.size();
  std::vector<double> z(n);  // local: draw is called concurrently
  for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const auto row = factor_.l.row(i);
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * z[k];
    out[order_[i]] = s;
  }
}

FieldSample sample_field(std::span<const SpaceTimePoint> points, int d,
                         std::uint64_t seed) {
  if (d <= 0) throw std::invalid_argument("sample_field: d must be positive");
  const FieldFactor factor(points);
  FieldSample s;
  s.points.assign(points.begin(), points.end());
  s.d = d;
  s.seed = seed;
  s.rng_id = kRngId;
  s.values = Matrix(points.size(), static_cast<std::size_t>(d));
  std::vector<double> col(points.size());
  for (int c = 0; c < d; ++c) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(c));
    factor.draw(rng, col);
    for (std::size_t i = 0; i < points.size(); ++i)
      s.values(i, static_cast<std::size_t>(c)) = col[i];
  }
  return s;
}

std::vector<SpaceTimePoint> scale_points(std::span<const SpaceTimePoint> points,
                                         double l) {
  if (!(l > 0.0)) throw std::invalid_argument("scale_points: L must be positive");
  const double l2 = l * l;
  const double l4 = l2 * l2;
  std::vector<SpaceTimePoint> out;
  out.reserve(points.size());
  for (const auto& p : points) out.emplace_back(l4 * p.t, l2 * p.x);
  return out;
}

}  // namespace stringlab
