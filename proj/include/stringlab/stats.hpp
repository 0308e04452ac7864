#pragma once

#include <span>
#include <vector>

namespace stringlab {

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);  // unbiased, n-1

// Kolmogorov-Smirnov statistic of v against N(0, sigma^2) with known sigma.
double ks_statistic_normal(std::vector<double> v, double sigma);
// asymptotic critical value at the given significance (0.01 or 0.05)
double ks_critical(std::size_t n, double alpha);

struct QuantileEstimate {
  double level = 0.0;  // e.g. 0.25
  double value = 0.0;
  double stderr_ = 0.0;  // from the distribution-free order-statistic interval
};

// nearest-rank quantiles of sorted data with rank-based standard errors
std::vector<QuantileEstimate> quantiles_with_stderr(
    std::vector<double> values, std::span<const double> levels);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace stringlab
