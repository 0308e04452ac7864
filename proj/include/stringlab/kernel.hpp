#pragma once

#include <array>
#include <span>
#include <vector>

#include "stringlab/matrix.hpp"

namespace stringlab {

double normal_pdf(double x);
double normal_cdf(double x);

// Mean absolute value of N(mu, sigma^2), evaluated in cancellation-free form;
// switches to the asymptotic |mu| for |mu|/sigma > 8.
double mean_abs_normal(double mu, double sigma);

// Index set of the string: time t >= 0, space x.
struct SpaceTimePoint {
  double t;
  double x;
  SpaceTimePoint(double t_, double x_);
};

// Variance-scale function F of the space-time increment law
//   E[(U_t(x) - U_s(y))^2] = |t-s|^{1/2} F(|x-y| |t-s|^{-1/2}),
// F(a) = E|N(a,1)| = a erf(a/sqrt 2) + sqrt(2/pi) exp(-a^2/2).
// F(0) = sqrt(2/pi), F nondecreasing, F(a) - a -> 0 from above.
double f_of(double a);

// Squared L2 distance E[(U_p - U_q)^2] of single components. Equal times
// reduce exactly to |x-y|; for |t-s| underflow-small the large-argument
// asymptote of F recovers |x-y| without special casing.
double sq_dist(const SpaceTimePoint& p, const SpaceTimePoint& q);

// Single-component covariance by polarization against the pinned origin.
double cov(const SpaceTimePoint& p, const SpaceTimePoint& q);

struct CovarianceMatrix {
  std::vector<SpaceTimePoint> points;
  Matrix entries;
  std::size_t size() const { return points.size(); }
};

CovarianceMatrix cov_matrix(std::span<const SpaceTimePoint> points,
                            int workers = 1);
// plain double loop, kept as the reference for the parallel assembly
CovarianceMatrix cov_matrix_serial(std::span<const SpaceTimePoint> points);

LowerFactor factorize(const CovarianceMatrix& m, int workers = 1);

struct Interval {
  double lo;
  double hi;
};

// P((X,Y) in rect) for a bivariate normal, absolute accuracy <= 1e-8.
// Degenerate variances and |rho| = 1 are handled exactly; otherwise adaptive
// quadrature of the conditional decomposition.
double bivariate_rect(const std::array<double, 2>& mean, const Matrix& cov2,
                      const Interval& x_range, const Interval& y_range);

struct GaussianConditioning {
  std::vector<std::size_t> observed;
  std::vector<std::size_t> unobserved;
  Matrix weights;       // unobserved x observed, maps observations to cond. mean
  Matrix residual_cov;  // Schur complement
};

GaussianConditioning condition_on(const CovarianceMatrix& m,
                                  std::span<const std::size_t> observed);

}  // namespace stringlab
