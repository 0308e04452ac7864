#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stringlab {

// Minimal dense row-major matrix; just what the Gaussian algebra needs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

  bool is_symmetric(double rel_tol) const;
  double max_abs() const;
  double trace() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);

// y = L z for lower-triangular L
void lower_matvec(const Matrix& l, std::span<const double> z, std::span<double> y);

struct LowerFactor {
  std::size_t n = 0;
  Matrix l;
  double jitter_used = 0.0;
};

// Cholesky of M + jitter*I tolerating exactly semidefinite input: a pivot
// within tolerance of zero marks a linearly dependent direction and its
// column of L is zeroed. Returns false when a pivot is negative beyond
// tolerance.
bool cholesky_psd(const Matrix& m, double jitter, Matrix& l);

// Escalating-jitter factorization: tries jitter 0, then 1e-12*trace/n
// escalating x10 up to 1e-6*trace/n, and keeps the first factor whose
// reconstruction satisfies max|LL^T - (M+jI)| <= 1e-9*(1+max|M|).
// Throws std::runtime_error when the ceiling is exhausted.
LowerFactor factorize_spd(const Matrix& m, int workers = 1);

// max|LL^T - (M + jitter*I)| over all entries
double reconstruction_error(const Matrix& l, const Matrix& m, double jitter,
                            int workers = 1);

// Solve L x = b, then L^T y = x (i.e. (LL^T) y = b) in place.
void cholesky_solve(const Matrix& l, std::span<double> b);

}  // namespace stringlab
