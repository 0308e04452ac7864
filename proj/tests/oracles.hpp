// Test-only oracles, independent of the library's evaluation paths.
#pragma once

#include <cmath>
#include <numbers>
#include <tuple>
#include <utility>
#include <vector>

#include "stringlab/kernel.hpp"
#include "stringlab/rng.hpp"

namespace oracles {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

// Quadrature oracle for the variance-scale function: the white-noise
// moving-average representation of the string gives
//   F(a) = (1/pi)^{1/2}
//        + int_0^inf [ (4pi(1+u))^{-1/2} + (4pi u)^{-1/2} - 2 Cross(u,a) ] du,
//   Cross(u,a) = int phi(z) g_{1+u}(a - sqrt(u) z) dz,
// with g_m the N(0,m) density. The u-integral is split at U with the
// substitutions u = w^2 (core) and u = U/s^2 (tail), both smooth.
class FOracle {
 public:
  FOracle() {
    std::tie(nodes_, weights_) = gauss_legendre(96);
  }

  double operator()(double a) const {
    const double u_split = 40.0;
    double total = 0.0;
    const double wmax = std::sqrt(u_split);
    const int panels = 16;
    for (int p = 0; p < panels; ++p) {
      const double lo = wmax * p / panels, hi = wmax * (p + 1) / panels;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double w = mid + half * nodes_[i];
        if (w <= 0.0) continue;
        total += weights_[i] * half * bracket(w * w, a) * 2.0 * w;
      }
    }
    for (int p = 0; p < panels; ++p) {
      const double lo = static_cast<double>(p) / panels;
      const double hi = static_cast<double>(p + 1) / panels;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double s = mid + half * nodes_[i];
        if (s <= 0.0) continue;
        const double u = u_split / (s * s);
        total += weights_[i] * half * bracket(u, a) * 2.0 * u_split / (s * s * s);
      }
    }
    return 1.0 / std::sqrt(std::numbers::pi) + total;
  }

 private:
  double bracket(double u, double a) const {
    const double pi = std::numbers::pi;
    return 1.0 / std::sqrt(4.0 * pi * (1.0 + u)) + 1.0 / std::sqrt(4.0 * pi * u) -
           2.0 * cross(u, a);
  }

  double cross(double u, double a) const {
    const double pi = std::numbers::pi;
    const double su = std::sqrt(u);
    const double limit = 12.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double z = limit * nodes_[i];
      const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi);
      const double arg = a - su * z;
      const double g =
          std::exp(-arg * arg / (2.0 * (1.0 + u))) / std::sqrt(2.0 * pi * (1.0 + u));
      acc += weights_[i] * limit * phi * g;
    }
    return acc;
  }

  std::vector<double> nodes_, weights_;
};

// Monte Carlo oracle for bivariate rectangle probabilities.
inline double mc_bivariate_rect(double rho, double lo1, double hi1, double lo2,
                                double hi2, std::size_t reps, std::uint64_t seed,
                                double* stderr_out) {
  stringlab::Rng rng(seed);
  const double mix = std::sqrt(1.0 - rho * rho);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < reps; ++i) {
    const double z1 = rng.normal();
    const double z2 = rho * z1 + mix * rng.normal();
    if (z1 > lo1 && z1 < hi1 && z2 > lo2 && z2 < hi2) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  if (stderr_out)
    *stderr_out = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  return p;
}

}  // namespace oracles
