#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "stringlab/matrix.hpp"
#include "stringlab/rng.hpp"

using namespace stringlab;

TEST_CASE("identity factors with zero jitter") {
  const LowerFactor f = factorize_spd(Matrix::identity(5));
  CHECK(f.jitter_used == 0.0);
  for (std::size_t i = 0; i < 5; ++i) CHECK(f.l(i, i) == 1.0);
}

TEST_CASE("zero matrix is semidefinite, factor is zero") {
  const Matrix z(4, 4);
  const LowerFactor f = factorize_spd(z);
  CHECK(f.jitter_used == 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(f.l(i, j) == 0.0);
}

TEST_CASE("exactly singular duplicated rows succeed within the jitter cap") {
  // Gram matrix of vectors (1,0), (1,0), (0,1): rank 2
  Matrix m(3, 3);
  m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
  m(0, 1) = m(1, 0) = 1.0;
  const LowerFactor f = factorize_spd(m);
  CHECK(f.jitter_used <= 1e-8 * m.trace() / 3.0);
  CHECK(reconstruction_error(f.l, m, f.jitter_used) <= 1e-9 * (1.0 + m.max_abs()));
}

TEST_CASE("indefinite matrix is rejected") {
  Matrix m = Matrix::identity(2);
  m(1, 1) = -1.0;
  CHECK_THROWS_AS(factorize_spd(m), std::runtime_error);
}

TEST_CASE("random PSD matrices round-trip") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 10);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += a(i, k) * a(j, k);
        m(i, j) = s;
      }
    const LowerFactor f = factorize_spd(m);
    CHECK(reconstruction_error(f.l, m, f.jitter_used) <=
          1e-9 * (1.0 + m.max_abs()));

    // solve against a known vector
    std::vector<double> truth(n), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) truth[i] = rng.normal();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) rhs[i] += m(i, j) * truth[j];
    cholesky_solve(f.l, rhs);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(rhs[i] - truth[i]) < 1e-5 * (1.0 + std::abs(truth[i])));
  }
}

TEST_CASE("lower_matvec multiplies by the lower triangle only") {
  Matrix l(2, 2);
  l(0, 0) = 2.0;
  l(1, 0) = 3.0;
  l(1, 1) = 4.0;
  const std::vector<double> z{1.0, 1.0};
  std::vector<double> y(2);
  lower_matvec(l, z, y);
  CHECK(y[0] == 2.0);
  CHECK(y[1] == 7.0);
}
