#pragma once

#include <cstdint>
#include <random>

#include "logsurf/surface.hpp"

namespace logsurf {

/// Deterministic generators for randomized suites. All draws go through
/// explicit modular reduction on mt19937_64 output, so a seed pins the
/// produced bytes across platforms and standard libraries.
class PairSampler {
 public:
  explicit PairSampler(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t pick(std::uint64_t lo, std::uint64_t hi);  // inclusive range
  /// Rational in [0,1] with denominator <= max_den.
  Rational rational_in_unit(std::uint64_t max_den);
  /// Rational in (0,1): l/k with 1 <= l <= k-1 (k >= 2).
  Rational grid_fraction(std::uint64_t k);

  /// Transverse configuration of `components` tracked divisors: pairwise
  /// intersection counts in [0, max_pair_units], self-intersections in
  /// [-3, 3], canonical degrees chosen with adjunction parity.
  SurfaceModel model(std::size_t components, std::uint64_t max_pair_units);

  /// Pair with all boundary coefficients on the grid {l/k}, coefficients
  /// < 1 (klt on a transverse configuration).
  LogPair klt_pair(std::size_t components, std::uint64_t k,
                   std::uint64_t max_pair_units);

  /// Pair with every coefficient < 1 and every intersecting pair of
  /// components summing below 1.
  LogPair terminal_pair(std::size_t components, std::uint64_t k,
                        std::uint64_t max_pair_units);

  std::mt19937_64& raw() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace logsurf
