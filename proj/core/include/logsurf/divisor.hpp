#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "logsurf/rational.hpp"

namespace logsurf {

/// Stable handle of a tracked prime divisor. Ids are scoped to a model
/// family: blow-ups allocate fresh ids, contractions remove ids, and an id
/// never changes meaning along a chain of models.
struct DivisorId {
  std::uint32_t value = 0;
  friend auto operator<=>(const DivisorId&, const DivisorId&) = default;
};

std::ostream& operator<<(std::ostream& os, DivisorId id);

/// Finite formal sum of tracked divisors with exact rational coefficients.
/// Zero coefficients are never stored, so support() and component_count()
/// are well defined; entries are kept sorted by id for deterministic
/// iteration and cheap equality.
class QDivisor {
 public:
  struct Entry {
    DivisorId id;
    Rational coeff;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  QDivisor() = default;
  QDivisor(std::initializer_list<Entry> entries);
  static QDivisor single(DivisorId id, Rational coeff);

  /// Coefficient of `id`; zero when absent.
  const Rational& coefficient(DivisorId id) const;
  /// Sets (or erases, when zero) one coefficient.
  void set_coefficient(DivisorId id, Rational coeff);
  void add_term(DivisorId id, const Rational& coeff);

  bool empty() const { return entries_.empty(); }
  /// Number of components (= nonzero coefficients).
  std::size_t component_count() const { return entries_.size(); }
  std::vector<DivisorId> support() const;
  bool is_effective() const;

  const std::vector<Entry>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  QDivisor& operator+=(const QDivisor& o);
  QDivisor& operator-=(const QDivisor& o);
  friend QDivisor operator+(QDivisor a, const QDivisor& b) { return a += b; }
  friend QDivisor operator-(QDivisor a, const QDivisor& b) { return a -= b; }
  friend QDivisor operator*(const Rational& s, const QDivisor& d);
  QDivisor operator-() const;

  friend bool operator==(const QDivisor&, const QDivisor&) = default;

 private:
  std::vector<Entry> entries_;
};

std::ostream& operator<<(std::ostream& os, const QDivisor& d);

/// Componentwise floor: each coefficient replaced by its integer floor.
QDivisor floor_divisor(const QDivisor& d);
/// Componentwise ceiling.
QDivisor ceil_divisor(const QDivisor& d);

struct BoundaryDecomposition {
  QDivisor less_one;   // components with coefficient < 1
  QDivisor equal_one;  // components with coefficient exactly 1
};

/// Splits a divisor with coefficients in [0,1] into its coefficient-one part
/// and the rest. Throws domain_error when a coefficient is outside [0,1].
BoundaryDecomposition decompose_boundary(const QDivisor& d);

/// Finite ascending set of rational coefficients in [0,1], optionally with a
/// declared positive infimum of the nonzero part. The declared floor stands
/// in for the minimum of the ambient (possibly infinite) descending-chain
/// set a finite input was drawn from.
class CoefficientSet {
 public:
  static CoefficientSet make(std::vector<Rational> elements,
                             std::optional<Rational> dcc_floor = std::nullopt);

  const std::vector<Rational>& elements() const { return elements_; }
  const std::optional<Rational>& dcc_floor() const { return dcc_floor_; }

  bool has_nonzero() const;
  /// Minimum of the nonzero elements. Throws domain_error when none exist.
  const Rational& min_nonzero() const;
  /// dcc_floor when declared, min_nonzero() otherwise.
  const Rational& effective_floor() const;

 private:
  std::vector<Rational> elements_;  // strictly ascending, within [0,1]
  std::optional<Rational> dcc_floor_;
};

struct RoundedCoefficients {
  BigInt grid;  // k: all outputs lie in {l/k}
  std::vector<std::pair<Rational, Rational>> map;  // nonzero a -> floor(k*a)/k
  /// Image of one coefficient under the rounding map (coefficients of value
  /// zero map to zero).
  Rational apply(const Rational& a) const;
};

/// Rounds every nonzero element a_i of `set` down onto the grid {l/k} with
/// k = ceil(1/(a*delta)) and a = set.effective_floor(). The choice of k
/// makes the loss strictly smaller than the margin delta:
/// (1-delta)*a_i < floor(k*a_i)/k <= a_i, exactly.
/// Requires 0 < delta < 1 and a nonzero element; throws domain_error
/// otherwise.
RoundedCoefficients round_coefficients(const CoefficientSet& set,
                                       const Rational& delta);

}  // namespace logsurf
