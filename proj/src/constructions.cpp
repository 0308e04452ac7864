#include "stringlab/constructions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stringlab/parallel.hpp"

namespace stringlab {

TnSequence tn_sequence(double alpha, std::size_t nmax) {
  if (!(alpha > 0.0 && alpha < 0.25))
    throw std::invalid_argument("tn_sequence: alpha must lie in (0, 1/4)");
  if (nmax < 1) throw std::invalid_argument("tn_sequence: nmax must be >= 1");
  TnSequence seq;
  seq.alpha = alpha;
  seq.r = 1.0 / (1.0 - 4.0 * alpha);
  seq.c = std::pow(0.5, std::ceil(seq.r) * seq.r);
  seq.values.resize(nmax);
  seq.values[0] = 1.0;
  for (std::size_t n = 1; n < nmax; ++n)
    seq.values[n] = seq.values[n - 1] + std::pow(seq.values[n - 1], 4.0 * alpha);
  for (std::size_t n = 1; n <= nmax; ++n) {
    if (seq.at(n) < seq.c * std::pow(static_cast<double>(n), seq.r))
      throw std::logic_error("tn_sequence: floor bound violated");
    if (n < nmax && seq.at(n) < 0.5 * seq.at(n + 1))
      throw std::logic_error("tn_sequence: step ratio below 1/2");
  }
  return seq;
}

long grid_m(int d, std::size_t n, long k) {
  const double base = std::sqrt(static_cast<double>(n)) + std::abs(k);
  return static_cast<long>(std::floor(std::pow(base, d / 6.0 - 1.1)));
}

GridSlice grid_points(double alpha, int d, std::size_t n, long k) {
  if (d < 7)
    throw std::invalid_argument("grid_points: construction requires d >= 7");
  if (n < 1) throw std::invalid_argument("grid_points: n >= 1 required");
  const TnSequence seq = tn_sequence(alpha, n + 1);
  GridSlice g;
  g.alpha = alpha;
  g.d = d;
  g.n = n;
  g.k = k;
  g.m = grid_m(d, n, k);
  const double tn = seq.at(n);
  const double tn2a = std::pow(tn, 2.0 * alpha);
  const double tn4a = std::pow(tn, 4.0 * alpha);
  g.t_lo = tn;
  g.t_hi = seq.at(n + 1);
  g.x_lo = static_cast<double>(k) * tn2a;
  g.x_hi = static_cast<double>(k + 1) * tn2a;
  const double m = static_cast<double>(g.m);
  g.sub_dt = tn4a / (m * m);
  g.sub_dx = tn2a / m;
  g.corner_t.resize(static_cast<std::size_t>(g.m * g.m));
  for (long i = 1; i <= g.m * g.m; ++i)
    g.corner_t[static_cast<std::size_t>(i - 1)] =
        tn + static_cast<double>(i) * g.sub_dt;
  g.corner_x.resize(static_cast<std::size_t>(g.m));
  for (long j = 1; j <= g.m; ++j)
    g.corner_x[static_cast<std::size_t>(j - 1)] =
        g.x_lo + static_cast<double>(j) * g.sub_dx;
  return g;
}

PartialSumTable grid_bound_partial_sum(SumKind kind, double alpha, int d,
                                       double delta, std::size_t nmax, long kmax,
                                       double c2, int workers) {
  if (d < 7) throw std::invalid_argument("grid_bound_partial_sum: d >= 7");
  if (!(alpha > 0.0 && alpha < 0.25))
    throw std::invalid_argument("grid_bound_partial_sum: alpha in (0, 1/4)");
  PartialSumTable tab;
  tab.kind = kind;
  tab.alpha = alpha;
  tab.delta = delta;
  tab.c2 = c2;
  tab.d = d;
  tab.nmax = nmax;
  tab.kmax = kmax;
  const double delta_pow = std::pow(delta, d);
  std::vector<double> row_sum(nmax, 0.0);
  parallel_for(nmax, workers, [&](std::size_t idx) {
    const std::size_t n = idx + 1;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    double acc = 0.0;
    for (long k = 0; k <= kmax; ++k) {
      const double base = sqrt_n + static_cast<double>(k);
      const double m = std::floor(std::pow(base, d / 6.0 - 1.1));
      if (kind == SumKind::smallball) {
        const double term = std::min(m * m * m * std::pow(base, -d / 2.0),
                                     std::pow(base, -3.3));
        acc += delta_pow * term;
      } else {
        acc += m * m * m * std::exp(-c2 * delta * delta * m);
      }
    }
    row_sum[idx] = acc;
  });
  tab.cumulative_by_n.resize(nmax);
  double running = 0.0;
  for (std::size_t i = 0; i < nmax; ++i) {
    running += row_sum[i];
    tab.cumulative_by_n[i] = running;
  }
  tab.total = running;
  return tab;
}

LatticeSpec lattice_points(int n_param, double alpha, std::size_t cap) {
  if (n_param < 2) throw std::invalid_argument("lattice_points: N >= 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("lattice_points: alpha > 0");
  LatticeSpec spec;
  spec.n_param = n_param;
  spec.alpha = alpha;
  spec.k = 1.0 / (6.0 * alpha + 1.0);
  const double nn = static_cast<double>(n_param);
  const double span = nn * nn - nn;
  spec.r = static_cast<long>(std::floor(std::pow(span, 1.0 / spec.k)));
  for (long i = 0; i <= spec.r; ++i) {
    const double t = nn + std::pow(static_cast<double>(i), spec.k);
    if (t > nn * nn + 1e-9) continue;
    const long jmax = static_cast<long>(std::floor(std::sqrt(t)));
    for (long j = 0; j <= jmax; ++j) {
      if (spec.points.size() >= cap)
        throw std::runtime_error(
            "lattice_points: point cap exceeded; reduce alpha or N");
      spec.points.push_back(LatticePoint{i, j, t});
    }
  }
  return spec;
}

namespace {

template <typename Fn>
double adaptive_simpson(const Fn& g, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// first-order integral, smooth after the substitution z = N e^w
double integral_first_order(double n_param, double six_alpha) {
  if (n_param <= 1.0) return 0.0;
  const double wmax = std::log(n_param);
  auto f = [&](double w) { return std::pow(1.0 - std::exp(-w), six_alpha); };
  const double fa = f(0.0), fb = f(wmax), fm = f(0.5 * wmax);
  const double whole = wmax / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, 0.0, wmax, fa, fm, fb, whole, 1e-11, 60);
}

}  // namespace

double first_order_integral(int n_param, double alpha) {
  if (n_param < 1) throw std::invalid_argument("first_order_integral: N >= 1");
  if (!(alpha > 0.0))
    throw std::invalid_argument("first_order_integral: alpha > 0");
  return integral_first_order(static_cast<double>(n_param), 6.0 * alpha);
}

FirstOrderSum first_order_sum(int n_param, double alpha, std::size_t cap) {
  if (n_param < 1) throw std::invalid_argument("first_order_sum: N >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("first_order_sum: alpha > 0");
  FirstOrderSum out;
  const double six_alpha = 6.0 * alpha;
  out.integral = integral_first_order(static_cast<double>(n_param), six_alpha);
  if (n_param >= 2) {
    const LatticeSpec spec = lattice_points(n_param, alpha, cap);
    for (const auto& pt : spec.points)
      out.lattice_sum += std::pow(pt.t, -six_alpha) *
                         std::pow(std::sqrt(pt.t) + static_cast<double>(pt.j), -3.0);
  }
  return out;
}

Lemma42Margin lemma42_margin(int alpha, double n_param) {
  if (alpha < 1) throw std::invalid_argument("lemma42_margin: alpha in Z+");
  if (n_param < 2.0) throw std::invalid_argument("lemma42_margin: N >= 2");
  const double k = 6.0 * alpha + 1.0;
  const double span = n_param * n_param - n_param;
  // lhs = 1 / ( (1 + span^-K)^{1/K} - 1 ), in log1p/expm1 form
  const double inner = std::pow(span, -k);
  Lemma42Margin m;
  m.lhs = 1.0 / std::expm1(std::log1p(inner) / k);
  const double rho = std::expm1(std::log(4.0) / k);
  m.bound = std::pow(n_param, 2.0 * k + 2.0) / rho;
  if (!std::isfinite(m.lhs) || !std::isfinite(m.bound))
    throw std::runtime_error(
        "lemma42_margin: overflow; reduce N or alpha");
  return m;
}

double union_lower_bound(std::span<const double> p,
                         const std::vector<std::vector<double>>& q) {
  const std::size_t n = p.size();
  if (q.size() != n)
    throw std::invalid_argument("union_lower_bound: q shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i].size() != n)
      throw std::invalid_argument("union_lower_bound: q shape mismatch");
    if (p[i] < -1e-12 || p[i] > 1.0 + 1e-12)
      throw std::invalid_argument("union_lower_bound: p out of [0,1]");
  }
  double sum_p = 0.0, sum_q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_p += p[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(q[i][j] - q[j][i]) > 1e-12)
        throw std::invalid_argument("union_lower_bound: q not symmetric");
      if (q[i][j] < 0.0 || q[i][j] > std::min(p[i], p[j]) + 1e-12)
        throw std::invalid_argument(
            "union_lower_bound: intersection exceeds marginal");
      sum_q += q[i][j];
    }
  }
  if (sum_p == 0.0) return 0.0;
  return sum_p * sum_p / (sum_p + 2.0 * sum_q);
}

}  // namespace stringlab
