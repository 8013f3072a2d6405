#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logsurf/surface.hpp"

namespace logsurf {

enum class SingularityClass {
  Terminal,
  Canonical,
  KltNotCanonical,
  LcNotKlt,
  NotLc,
};

std::string to_string(SingularityClass c);

/// A point class over the pair attaining a discrepancy value: a free point
/// of one tracked divisor, a transverse intersection point of two, or a
/// point off the tracked configuration.
struct DiscrepancyWitness {
  enum class Location { FreePoint, IntersectionPoint, GeneralPoint };

  Location location = Location::GeneralPoint;
  DivisorId first{};   // FreePoint, IntersectionPoint
  DivisorId second{};  // IntersectionPoint
  Rational discrepancy;

  friend bool operator==(const DiscrepancyWitness&,
                         const DiscrepancyWitness&) = default;
};

struct MinDiscrepancy {
  /// False means unbounded below (some boundary coefficient exceeds 1 and
  /// weighted blow-ups drive the discrepancy to -infinity).
  bool bounded = true;
  Rational value;  // meaningful when bounded
  std::vector<DiscrepancyWitness> witnesses;  // locations attaining the min
};

/// Minimal discrepancy of exceptional divisors over a transverse (SNC) pair,
/// in closed form: a free point of D_i contributes 1 - a_i, an intersection
/// point of D_i and D_j contributes 1 - a_i - a_j (the infimum over weighted
/// blow-ups, attained at weight (1,1) when coefficients stay <= 1), a
/// general point contributes 1. Sub-boundary coefficients are allowed;
/// coefficients above 1 make the infimum -infinity.
MinDiscrepancy min_discrepancy_snc(const LogPair& pair);

struct SingularityReport {
  SingularityClass classification = SingularityClass::NotLc;
  /// Supremum of the levels e for which the pair is e-klt under the
  /// two-clause convention (all discrepancies > -1+e and all coefficients
  /// <= 1-e); disengaged when the pair is not klt.
  std::optional<Rational> epsilon_klt_threshold;
  MinDiscrepancy min_exceptional;
  std::vector<DiscrepancyWitness> witnesses;
};

/// Classifies a transverse pair. Terminal iff every coefficient is < 1 and
/// every intersecting pair has coefficient sum < 1; canonical iff the
/// minimal exceptional discrepancy is >= 0; klt iff all coefficients < 1;
/// lc iff all <= 1.
SingularityReport classify(const LogPair& pair);

/// Exhaustive oracle: enumerates every blow-up sequence of length <= depth
/// over all valid specs (including on newly created exceptionals), tracking
/// crepant coefficients with sub-boundaries allowed, and returns the
/// minimal discrepancy observed. Exists to falsify wrong closed forms;
/// depth is capped at brute_force_max_depth().
Rational brute_force_min_discrepancy(const LogPair& pair, int depth);
int brute_force_max_depth();

/// Smallest positive N such that N times the pullback of `d` through the
/// morphism has integer coefficients (and N*d does): the lcm of all pullback
/// coefficient denominators. `d` lives on the morphism's target.
BigInt cartier_index(const ModelMorphism& morphism, const QDivisor& d);

/// Cartier index of K + boundary on the target of a contraction chain:
/// the lcm of the denominators appearing in the crepant pullback boundary
/// (strict-transform coefficients together with the solved exceptional
/// coefficients). The source model is taken to have integral canonical
/// data, so this is exactly the denominator content of the pulled-back log
/// divisor.
BigInt log_cartier_index(const ModelMorphism& morphism,
                         const LogPair& target_pair);

}  // namespace logsurf
