#include "stringlab/spde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>

#include "stringlab/rng.hpp"

namespace stringlab {

std::size_t SpdeTrajectory::site_at(double x) const {
  std::size_t best = 0;
  double dist = std::abs(grid[0] - x);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - x) < dist) {
      dist = std::abs(grid[i] - x);
      best = i;
    }
  return best;
}

namespace {

long checked_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const long rounded = std::lround(r);
  if (rounded < 0 || std::abs(r - static_cast<double>(rounded)) > 1e-9 * (1.0 + r))
    throw std::invalid_argument(std::string("spde: ") + what +
                                " must be an integer multiple");
  return rounded;
}

void validate(const SpdeConfig& c) {
  if (c.dx <= 0 || c.dt <= 0 || c.window <= 0 || c.horizon < 0 || c.d < 1)
    throw std::invalid_argument("spde: non-positive configuration value");
  if (c.dt > c.dx * c.dx / 2.0 + 1e-15)
    throw std::invalid_argument("spde: stability requires dt <= dx^2/2");
}

}  // namespace

SpdeTrajectory simulate(const SpdeConfig& config,
                        std::span<const double> snapshot_times) {
  validate(config);
  const long half_sites = checked_ratio(config.window, config.dx, "window/dx");
  const long steps = checked_ratio(config.horizon, config.dt, "T/dt");

  const bool periodic = config.boundary == Boundary::periodic;
  // periodic identifies x = -X with x = X; reflecting keeps both endpoints
  const std::size_t nx = static_cast<std::size_t>(periodic ? 2 * half_sites
                                                           : 2 * half_sites + 1);
  const std::size_t center = static_cast<std::size_t>(half_sites);
  const std::size_t nd = static_cast<std::size_t>(config.d);

  std::set<long> snap_steps;
  for (double s : snapshot_times) {
    if (s < -1e-12 || s > config.horizon + 1e-12)
      throw std::invalid_argument("spde: snapshot time outside [0, T]");
    snap_steps.insert(checked_ratio(s, config.dt, "snapshot/dt"));
  }

  SpdeTrajectory traj;
  traj.config = config;
  traj.grid.resize(nx);
  for (std::size_t i = 0; i < nx; ++i)
    traj.grid[i] = -config.window + static_cast<double>(i) * config.dx;

  std::vector<double> u(nx * nd, 0.0), next(nx * nd, 0.0);

  switch (config.init) {
    case SpdeInit::zero:
      break;
    case SpdeInit::sine: {
      const double k = 2.0 * std::numbers::pi / config.window;
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t c = 0; c < nd; ++c)
          u[i * nd + c] = std::sin(k * traj.grid[i]);
      break;
    }
    case SpdeInit::pinned_bm: {
      // Two-sided Brownian motion pinned at x = 0, increments N(0, dx).
      // One stream per (side, component) so that runs whose grids differ only
      // at the boundary (periodic vs reflecting) share every interior draw.
      const double sd = std::sqrt(config.dx);
      for (std::size_t c = 0; c < nd; ++c) {
        Rng right = Rng::stream(config.seed, 2 * c);
        Rng left = Rng::stream(config.seed, 2 * c + 1);
        for (std::size_t i = center + 1; i < nx; ++i)
          u[i * nd + c] = u[(i - 1) * nd + c] + sd * right.normal();
        for (std::size_t i = center; i-- > 0;)
          u[i * nd + c] = u[(i + 1) * nd + c] + sd * left.normal();
      }
      break;
    }
  }

  // one noise stream per site, again shared across boundary modes
  std::vector<Rng> site_rng;
  site_rng.reserve(nx);
  for (std::size_t i = 0; i < nx; ++i)
    site_rng.push_back(Rng::stream(config.seed, 2 * nd + i));

  const double diff = 0.5 * config.dt / (config.dx * config.dx);
  const double amp = config.noise_scale * std::sqrt(config.dt / config.dx);

  auto snapshot = [&](long step) {
    Matrix snap(nx, nd);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t c = 0; c < nd; ++c) snap(i, c) = u[i * nd + c];
    traj.times.push_back(static_cast<double>(step) * config.dt);
    traj.values.push_back(std::move(snap));
  };

  if (snap_steps.count(0)) snapshot(0);

  for (long step = 1; step <= steps; ++step) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t left = i > 0 ? i - 1 : (periodic ? nx - 1 : 1);
      const std::size_t right = i + 1 < nx ? i + 1 : (periodic ? 0 : nx - 2);
      Rng& rng = site_rng[i];
      for (std::size_t c = 0; c < nd; ++c) {
        const double lap =
            u[left * nd + c] - 2.0 * u[i * nd + c] + u[right * nd + c];
        next[i * nd + c] = u[i * nd + c] + diff * lap + amp * rng.normal();
      }
    }
    u.swap(next);
    if (snap_steps.count(step)) snapshot(step);
  }
  return traj;
}

void write_csv(const SpdeTrajectory& traj, std::ostream& os) {
  os << "t,x,component,value\n";
  char buf[96];
  for (std::size_t s = 0; s < traj.times.size(); ++s)
    for (std::size_t i = 0; i < traj.grid.size(); ++i)
      for (std::size_t c = 0; c < traj.values[s].cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%zu,%.17g\n", traj.times[s],
                      traj.grid[i], c, traj.values[s](i, c));
        os << buf;
      }
}

}  // namespace stringlab
