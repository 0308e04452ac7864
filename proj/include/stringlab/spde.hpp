#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stringlab/matrix.hpp"

namespace stringlab {

enum class Boundary { periodic, reflecting };
enum class SpdeInit { pinned_bm, zero, sine };

// Explicit Euler discretization of the stochastic heat equation driving the
// string, du = (1/2) u_xx dt + dW, with lattice noise sqrt(dt/dx) per site.
// noise_scale and init are test hooks (deterministic runs, decay oracles).
struct SpdeConfig {
  double dx = 0.05;
  double dt = 0.001;
  double window = 20.0;  // spatial window [-X, X]
  double horizon = 1.0;  // final time T
  int d = 1;
  Boundary boundary = Boundary::reflecting;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;
  SpdeInit init = SpdeInit::pinned_bm;
};

struct SpdeTrajectory {
  std::vector<double> times;
  std::vector<double> grid;
  std::vector<Matrix> values;  // one n_x x d matrix per snapshot
  SpdeConfig config;

  // row index of the grid point closest to x
  std::size_t site_at(double x) const;
};

// throws std::invalid_argument on config violations (stability dt <= dx^2/2,
// window/horizon not commensurate with the steps, snapshots beyond T)
SpdeTrajectory simulate(const SpdeConfig& config,
                        std::span<const double> snapshot_times);

// columns: t,x,component,value
void write_csv(const SpdeTrajectory& traj, std::ostream& os);

}  // namespace stringlab
