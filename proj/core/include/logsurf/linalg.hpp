#pragma once

#include <optional>
#include <vector>

#include "logsurf/rational.hpp"

namespace logsurf {

/// Dense rational matrix in row-major order; rows need not be square.
using RationalMatrix = std::vector<std::vector<Rational>>;

/// Solves A*x = b exactly by Gaussian elimination. Requires A square and
/// nonsingular; returns nullopt when singular.
std::optional<std::vector<Rational>> solve_square(RationalMatrix a,
                                                  std::vector<Rational> b);

/// Solves A*x = b for a general m-by-n system. Returns one exact solution
/// (free variables pinned to zero) when the system is consistent, nullopt
/// otherwise. The choice of solution is deterministic.
std::optional<std::vector<Rational>> solve_consistent(RationalMatrix a,
                                                      std::vector<Rational> b);

}  // namespace logsurf
