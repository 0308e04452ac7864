#include "stringlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "stringlab/parallel.hpp"

namespace stringlab {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);
}  // namespace

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (1.0 / std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double mean_abs_normal(double mu, double sigma) {
  const double m = std::abs(mu);
  if (sigma <= 0.0) return m;
  if (m / sigma > 8.0) return m;  // correction < 1e-16 relative
  return sigma * kSqrt2OverPi * std::exp(-mu * mu / (2.0 * sigma * sigma)) +
         mu * std::erf(mu / (sigma * kSqrt2));
}

SpaceTimePoint::SpaceTimePoint(double t_, double x_) : t(t_), x(x_) {
  if (!std::isfinite(t_) || !std::isfinite(x_))
    throw std::invalid_argument("SpaceTimePoint: non-finite coordinate");
  if (t_ < 0.0) throw std::invalid_argument("SpaceTimePoint: negative time");
}

double f_of(double a) {
  if (!(a >= 0.0) || !std::isfinite(a))
    throw std::domain_error("f_of: argument must be finite and >= 0");
  return mean_abs_normal(a, 1.0);
}

double sq_dist(const SpaceTimePoint& p, const SpaceTimePoint& q) {
  const double dt = std::abs(p.t - q.t);
  const double dx = std::abs(p.x - q.x);
  if (dt == 0.0) return dx;
  const double root = std::sqrt(dt);
  return root * f_of(dx / root);
}

double cov(const SpaceTimePoint& p, const SpaceTimePoint& q) {
  const SpaceTimePoint origin(0.0, 0.0);
  return 0.5 * (sq_dist(p, origin) + sq_dist(q, origin) - sq_dist(p, q));
}

namespace {

CovarianceMatrix assemble(std::span<const SpaceTimePoint> points, int workers) {
  if (points.empty())
    throw std::invalid_argument("cov_matrix: empty point list");
  const std::size_t n = points.size();
  CovarianceMatrix m;
  m.points.assign(points.begin(), points.end());
  m.entries = Matrix(n, n);
  const SpaceTimePoint origin(0.0, 0.0);
  std::vector<double> to_origin(n);
  for (std::size_t i = 0; i < n; ++i) to_origin[i] = sq_dist(points[i], origin);
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      const double c =
          0.5 * (to_origin[i] + to_origin[j] - sq_dist(points[i], points[j]));
      m.entries(i, j) = c;
      m.entries(j, i) = c;
    }
  });
  return m;
}

}  // namespace

CovarianceMatrix cov_matrix(std::span<const SpaceTimePoint> points, int workers) {
  return assemble(points, workers);
}

CovarianceMatrix cov_matrix_serial(std::span<const SpaceTimePoint> points) {
  return assemble(points, 1);
}

LowerFactor factorize(const CovarianceMatrix& m, int workers) {
  if (!m.entries.is_symmetric(1e-12))
    throw std::invalid_argument("factorize: covariance not symmetric");
  return factorize_spd(m.entries, workers);
}

namespace {

double interval_prob(double mu, double sigma, const Interval& r) {
  if (sigma <= 0.0) return (mu > r.lo && mu < r.hi) ? 1.0 : 0.0;
  return normal_cdf((r.hi - mu) / sigma) - normal_cdf((r.lo - mu) / sigma);
}

struct CondSlice {
  double mu1, sigma1, mu2, sigma2, rho, cond_sd;
  Interval y;
  double operator()(double x) const {
    const double m = mu2 + rho * sigma2 / sigma1 * (x - mu1);
    const double z = (x - mu1) / sigma1;
    return normal_pdf(z) / sigma1 *
           (normal_cdf((y.hi - m) / cond_sd) - normal_cdf((y.lo - m) / cond_sd));
  }
};

double adaptive_simpson(const CondSlice& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double bivariate_rect(const std::array<double, 2>& mean, const Matrix& cov2,
                      const Interval& x_range, const Interval& y_range) {
  if (cov2.rows() != 2 || cov2.cols() != 2)
    throw std::invalid_argument("bivariate_rect: covariance must be 2x2");
  if (!cov2.is_symmetric(1e-9))
    throw std::invalid_argument("bivariate_rect: covariance not symmetric");
  const double v1 = cov2(0, 0), v2 = cov2(1, 1);
  const double c = 0.5 * (cov2(0, 1) + cov2(1, 0));
  const double scale = std::max({std::abs(v1), std::abs(v2), 1e-300});
  if (v1 < -1e-12 * scale || v2 < -1e-12 * scale ||
      c * c > v1 * v2 + 1e-10 * scale * scale)
    throw std::invalid_argument("bivariate_rect: covariance not PSD");
  if (x_range.lo > x_range.hi || y_range.lo > y_range.hi)
    throw std::invalid_argument("bivariate_rect: interval not ordered");

  const double sigma1 = std::sqrt(std::max(v1, 0.0));
  const double sigma2 = std::sqrt(std::max(v2, 0.0));
  if (sigma1 == 0.0)
    return (mean[0] > x_range.lo && mean[0] < x_range.hi)
               ? interval_prob(mean[1], sigma2, y_range)
               : 0.0;
  if (sigma2 == 0.0)
    return (mean[1] > y_range.lo && mean[1] < y_range.hi)
               ? interval_prob(mean[0], sigma1, x_range)
               : 0.0;

  double rho = c / (sigma1 * sigma2);
  rho = std::clamp(rho, -1.0, 1.0);
  if (1.0 - rho * rho < 1e-14) {
    // Y is an affine function of X; intersect the two X-constraints.
    const double slope = (rho > 0 ? 1.0 : -1.0) * sigma2 / sigma1;
    double lo = (y_range.lo - mean[1]) / slope + mean[0];
    double hi = (y_range.hi - mean[1]) / slope + mean[0];
    if (slope < 0) std::swap(lo, hi);
    const Interval merged{std::max(x_range.lo, lo), std::min(x_range.hi, hi)};
    if (merged.lo >= merged.hi) return 0.0;
    return interval_prob(mean[0], sigma1, merged);
  }

  const double lo = std::max(x_range.lo, mean[0] - 9.0 * sigma1);
  const double hi = std::min(x_range.hi, mean[0] + 9.0 * sigma1);
  if (lo >= hi) return 0.0;
  const CondSlice f{mean[0],
                    sigma1,
                    mean[1],
                    sigma2,
                    rho,
                    sigma2 * std::sqrt(1.0 - rho * rho),
                    y_range};
  const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  const double p = adaptive_simpson(f, lo, hi, fa, fm, fb, whole, 1e-10, 48);
  return std::clamp(p, 0.0, 1.0);
}

GaussianConditioning condition_on(const CovarianceMatrix& m,
                                  std::span<const std::size_t> observed) {
  const std::size_t n = m.size();
  std::vector<bool> is_obs(n, false);
  for (std::size_t idx : observed) {
    if (idx >= n) throw std::invalid_argument("condition_on: index out of range");
    if (is_obs[idx]) throw std::invalid_argument("condition_on: duplicate index");
    is_obs[idx] = true;
  }
  GaussianConditioning out;
  out.observed.assign(observed.begin(), observed.end());
  for (std::size_t i = 0; i < n; ++i)
    if (!is_obs[i]) out.unobserved.push_back(i);
  const std::size_t no = out.observed.size();
  const std::size_t nu = out.unobserved.size();

  if (no == 0) {
    out.weights = Matrix(nu, 0);
    out.residual_cov = m.entries;
    return out;
  }

  Matrix moo(no, no);
  for (std::size_t i = 0; i < no; ++i)
    for (std::size_t j = 0; j < no; ++j)
      moo(i, j) = m.entries(out.observed[i], out.observed[j]);
  const LowerFactor lf = factorize_spd(moo);

  // weights row r solves M_oo w = M_ou(:, r)
  out.weights = Matrix(nu, no);
  std::vector<double> col(no);
  for (std::size_t r = 0; r < nu; ++r) {
    for (std::size_t j = 0; j < no; ++j)
      col[j] = m.entries(out.unobserved[r], out.observed[j]);
    cholesky_solve(lf.l, col);
    for (std::size_t j = 0; j < no; ++j) out.weights(r, j) = col[j];
  }

  out.residual_cov = Matrix(nu, nu);
  for (std::size_t r = 0; r < nu; ++r)
    for (std::size_t s2 = r; s2 < nu; ++s2) {
      double acc = m.entries(out.unobserved[r], out.unobserved[s2]);
      for (std::size_t j = 0; j < no; ++j)
        acc -= out.weights(r, j) * m.entries(out.unobserved[s2], out.observed[j]);
      out.residual_cov(r, s2) = acc;
      out.residual_cov(s2, r) = acc;
    }
  return out;
}

}  // namespace stringlab
