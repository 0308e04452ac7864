#include "stringlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stringlab/kernel.hpp"

namespace stringlab {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double ks_statistic_normal(std::vector<double> v, double sigma) {
  if (v.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double cdf = sigma > 0 ? normal_cdf(v[i] / sigma) : (v[i] >= 0 ? 1.0 : 0.0);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  // c(alpha) = sqrt(-ln(alpha/2)/2), asymptotic Kolmogorov quantile
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c / std::sqrt(static_cast<double>(n));
}

std::vector<QuantileEstimate> quantiles_with_stderr(
    std::vector<double> values, std::span<const double> levels) {
  if (values.empty()) throw std::invalid_argument("quantiles: empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<QuantileEstimate> out;
  out.reserve(levels.size());
  for (double q : levels) {
    QuantileEstimate e;
    e.level = q;
    const auto idx = static_cast<std::size_t>(std::min<double>(
        static_cast<double>(n - 1), std::floor(q * static_cast<double>(n))));
    e.value = values[idx];
    const double spread = 1.96 * std::sqrt(static_cast<double>(n) * q * (1 - q));
    const auto lo = static_cast<std::size_t>(
        std::max(0.0, std::floor(q * static_cast<double>(n) - spread)));
    const auto hi = static_cast<std::size_t>(std::min<double>(
        static_cast<double>(n - 1), std::ceil(q * static_cast<double>(n) + spread)));
    e.stderr_ = (values[hi] - values[lo]) / (2.0 * 1.96);
    out.push_back(e);
  }
  return out;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 matched points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace stringlab
