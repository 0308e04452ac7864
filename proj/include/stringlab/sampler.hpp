#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stringlab/kernel.hpp"
#include "stringlab/rng.hpp"

namespace stringlab {

struct FieldSample {
  std::vector<SpaceTimePoint> points;
  int d = 0;
  Matrix values;  // n x d
  std::uint64_t seed = 0;
  std::string rng_id;
};

// Canonically ordered covariance factor with the permutation back to caller
// order, so identical point sets factor identically however they are passed.
// Reused across replicates by the estimators.
class FieldFactor {
 public:
  FieldFactor(std::span<const SpaceTimePoint> points, int workers = 1);

  std::size_t size() const { return order_.size(); }
  // one component in caller order; draws size() normals from rng
  void draw(Rng& rng, std::span<double> out) const;

 private:
  std::vector<std::size_t> order_;  // canonical row -> caller index
  LowerFactor factor_;
};

// Exact draw of the d-component string at the given points. Column c is
// L z with z from stream (seed, c), so extending d leaves earlier columns
// unchanged.
FieldSample sample_field(std::span<const SpaceTimePoint> points, int d,
                         std::uint64_t seed);

// (t, x) -> (L^4 t, L^2 x); the string's exact scaling transform.
std::vector<SpaceTimePoint> scale_points(std::span<const SpaceTimePoint> points,
                                         double l);

}  // namespace stringlab
