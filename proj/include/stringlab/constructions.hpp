#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace stringlab {

// t_1 = 1, t_{n+1} = t_n + t_n^{4 alpha}; grows like n^{1/(1-4 alpha)}.
struct TnSequence {
  double alpha = 0.0;
  double r = 0.0;  // 1/(1-4 alpha)
  double c = 0.0;  // (1/2)^{ceil(r) * r}, the proven floor constant
  std::vector<double> values;  // values[n-1] = t_n

  double at(std::size_t n) const { return values.at(n - 1); }
};

TnSequence tn_sequence(double alpha, std::size_t nmax);

// One (n, k) cell of the transience grid: the rectangle
// [t_n, t_{n+1}] x [k t_n^{2a}, (k+1) t_n^{2a}] cut into m^3 sub-rectangles
// with the corner points used as grid points.
struct GridSlice {
  double alpha = 0.0;
  int d = 0;
  std::size_t n = 0;
  long k = 0;
  long m = 0;
  double t_lo = 0, t_hi = 0, x_lo = 0, x_hi = 0;
  double sub_dt = 0, sub_dx = 0;       // sub-rectangle side lengths
  std::vector<double> corner_t;        // m^2 values, i = 1..m^2
  std::vector<double> corner_x;        // m values, j = 1..m
};

GridSlice grid_points(double alpha, int d, std::size_t n, long k);

// m(n, k) = floor((sqrt n + |k|)^{d/6 - 1.1})
long grid_m(int d, std::size_t n, long k);

enum class SumKind { smallball, oscillation };

struct PartialSumTable {
  SumKind kind;
  double alpha = 0, delta = 0, c2 = 0;
  int d = 0;
  std::size_t nmax = 0;
  long kmax = 0;
  std::vector<double> cumulative_by_n;  // partial sums after each n
  double total = 0.0;
};

// Partial sums of the grid bounding terms over n <= nmax, 0 <= k <= kmax.
// smallball: delta^d * min(m^3 (sqrt n + k)^{-d/2}, (sqrt n + k)^{-3.3});
// oscillation: m^3 exp(-c2 delta^2 m).
PartialSumTable grid_bound_partial_sum(SumKind kind, double alpha, int d,
                                       double delta, std::size_t nmax, long kmax,
                                       double c2 = 1.0, int workers = 1);

struct LatticePoint {
  long i = 0, j = 0;
  double t = 0.0;
};

struct LatticeSpec {
  int n_param = 0;      // N
  double alpha = 0.0;
  double k = 0.0;       // 1/(6 alpha + 1)
  long r = 0;           // floor((N^2 - N)^{1/k})
  std::vector<LatticePoint> points;
};

LatticeSpec lattice_points(int n_param, double alpha, std::size_t cap = 100000);

struct FirstOrderSum {
  double lattice_sum = 0.0;
  double integral = 0.0;  // int_N^{N^2} (1 - N/z)^{6 alpha} dz/z
};

FirstOrderSum first_order_sum(int n_param, double alpha,
                              std::size_t cap = 100000);

// the integral alone; no lattice enumeration, so any N is fine
double first_order_integral(int n_param, double alpha);

struct Lemma42Margin {
  double lhs = 0.0;    // ((1+(N^2-N)^{-K})^{1/K} - 1)^{-1}, K = 6 alpha + 1
  double bound = 0.0;  // N^{2K+2} / (4^{1/K} - 1)
};

Lemma42Margin lemma42_margin(int alpha, double n_param);

// Second-moment lower bound (sum p)^2 / (sum p + 2 sum_{i<j} q_ij) for
// P(union A_i); q is the pairwise-intersection matrix.
double union_lower_bound(std::span<const double> p,
                         const std::vector<std::vector<double>>& q);

}  // namespace stringlab
