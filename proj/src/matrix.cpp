#include "stringlab/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stringlab/parallel.hpp"

namespace stringlab {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::is_symmetric(double rel_tol) const {
  if (rows_ != cols_) return false;
  const double scale = max_abs();
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > rel_tol * (1.0 + scale))
        return false;
  return true;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

void lower_matvec(const Matrix& l, std::span<const double> z, std::span<double> y) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const auto row = l.row(i);
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * z[k];
    y[i] = s;
  }
}

bool cholesky_psd(const Matrix& m, double jitter, Matrix& l) {
  const std::size_t n = m.rows();
  l = Matrix(n, n);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    max_diag = std::max(max_diag, std::abs(m(i, i)) + jitter);
  const double tol =
      static_cast<double>(std::max<std::size_t>(n, 1)) *
      std::numeric_limits<double>::epsilon() * max_diag;

  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j) + jitter;
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d > tol) {
      const double ljj = std::sqrt(d);
      l(j, j) = ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = m(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        l(i, j) = s / ljj;
      }
    } else if (d >= -tol) {
      // dependent direction (e.g. duplicated points, the pinned origin)
      for (std::size_t i = j; i < n; ++i) l(i, j) = 0.0;
    } else {
      return false;
    }
  }
  return true;
}

double reconstruction_error(const Matrix& l, const Matrix& m, double jitter,
                            int workers) {
  const std::size_t n = m.rows();
  std::vector<double> row_err(n, 0.0);
  parallel_for(n, workers, [&](std::size_t i) {
    double worst = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      const std::size_t kmax = std::min(i, j);
      for (std::size_t k = 0; k <= kmax; ++k) s += l(i, k) * l(j, k);
      double target = m(i, j);
      if (i == j) target += jitter;
      worst = std::max(worst, std::abs(s - target));
    }
    row_err[i] = worst;
  });
  return *std::max_element(row_err.begin(), row_err.end());
}

LowerFactor factorize_spd(const Matrix& m, int workers) {
  if (m.rows() != m.cols()) throw std::invalid_argument("factorize: not square");
  const std::size_t n = m.rows();
  const double tau = n > 0 ? m.trace() / static_cast<double>(n) : 0.0;
  const double err_bound = 1e-9 * (1.0 + m.max_abs());

  double jitter = 0.0;
  Matrix l;
  for (;;) {
    if (cholesky_psd(m, jitter, l) &&
        reconstruction_error(l, m, jitter, workers) <= err_bound)
      return LowerFactor{n, std::move(l), jitter};
    if (tau <= 0.0) break;
    if (jitter == 0.0)
      jitter = 1e-12 * tau;
    else if (jitter < 1e-6 * tau * 0.999)
      jitter = std::min(jitter * 10.0, 1e-6 * tau);
    else
      break;
  }
  throw std::runtime_error("factorize: matrix not PSD within jitter tolerance");
}

void cholesky_solve(const Matrix& l, std::span<double> b) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
    if (l(i, i) == 0.0) {
      if (std::abs(s) > 1e-9 * (1.0 + std::abs(b[i])))
        throw std::runtime_error("cholesky_solve: inconsistent singular system");
      b[i] = 0.0;
    } else {
      b[i] = s / l(i, i);
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * b[k];
    if (l(ii, ii) == 0.0)
      b[ii] = 0.0;
    else
      b[ii] = s / l(ii, ii);
  }
}

}  // namespace stringlab
