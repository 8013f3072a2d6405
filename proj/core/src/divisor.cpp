#include "logsurf/divisor.hpp"

#include <algorithm>
#include <ostream>

#include "logsurf/errors.hpp"

namespace logsurf {

namespace {
const Rational kZero{};
const Rational kOne{1};
}  // namespace

std::ostream& operator<<(std::ostream& os, DivisorId id) {
  return os << '#' << id.value;
}

QDivisor::QDivisor(std::initializer_list<Entry> entries) {
  for (const Entry& e : entries) add_term(e.id, e.coeff);
}

QDivisor QDivisor::single(DivisorId id, Rational coeff) {
  QDivisor d;
  d.set_coefficient(id, std::move(coeff));
  return d;
}

const Rational& QDivisor::coefficient(DivisorId id) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const Entry& e, DivisorId key) { return e.id < key; });
  if (it != entries_.end() && it->id == id) return it->coeff;
  return kZero;
}

void QDivisor::set_coefficient(DivisorId id, Rational coeff) {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const Entry& e, DivisorId key) { return e.id < key; });
  if (it != entries_.end() && it->id == id) {
    if (coeff.is_zero())
      entries_.erase(it);
    else
      it->coeff = std::move(coeff);
  } else if (!coeff.is_zero()) {
    entries_.insert(it, Entry{id, std::move(coeff)});
  }
}

void QDivisor::add_term(DivisorId id, const Rational& coeff) {
  if (coeff.is_zero()) return;
  set_coefficient(id, coefficient(id) + coeff);
}

std::vector<DivisorId> QDivisor::support() const {
  std::vector<DivisorId> ids;
  ids.reserve(entries_.size());
  for (const Entry& e : entries_) ids.push_back(e.id);
  return ids;
}

bool QDivisor::is_effective() const {
  return std::none_of(entries_.begin(), entries_.end(),
                      [](const Entry& e) { return e.coeff.is_negative(); });
}

QDivisor& QDivisor::operator+=(const QDivisor& o) {
  for (const Entry& e : o.entries_) add_term(e.id, e.coeff);
  return *this;
}

QDivisor& QDivisor::operator-=(const QDivisor& o) {
  for (const Entry& e : o.entries_) add_term(e.id, -e.coeff);
  return *this;
}

QDivisor operator*(const Rational& s, const QDivisor& d) {
  QDivisor out;
  if (s.is_zero()) return out;
  for (const QDivisor::Entry& e : d.entries())
    out.set_coefficient(e.id, s * e.coeff);
  return out;
}

QDivisor QDivisor::operator-() const { return Rational(-1) * *this; }

std::ostream& operator<<(std::ostream& os, const QDivisor& d) {
  if (d.empty()) return os << "0";
  bool first = true;
  for (const QDivisor::Entry& e : d.entries()) {
    if (!first) os << " + ";
    os << e.coeff << '*' << e.id;
    first = false;
  }
  return os;
}

QDivisor floor_divisor(const QDivisor& d) {
  QDivisor out;
  for (const QDivisor::Entry& e : d.entries())
    out.set_coefficient(e.id, Rational(e.coeff.floor()));
  return out;
}

QDivisor ceil_divisor(const QDivisor& d) {
  QDivisor out;
  for (const QDivisor::Entry& e : d.entries())
    out.set_coefficient(e.id, Rational(e.coeff.ceil()));
  return out;
}

BoundaryDecomposition decompose_boundary(const QDivisor& d) {
  BoundaryDecomposition out;
  for (const QDivisor::Entry& e : d.entries()) {
    if (e.coeff.is_negative() || e.coeff > kOne)
      throw domain_error("boundary decomposition needs coefficients in [0,1]");
    if (e.coeff == kOne)
      out.equal_one.set_coefficient(e.id, e.coeff);
    else
      out.less_one.set_coefficient(e.id, e.coeff);
  }
  return out;
}

CoefficientSet CoefficientSet::make(std::vector<Rational> elements,
                                    std::optional<Rational> dcc_floor) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()),
                 elements.end());
  for (const Rational& x : elements)
    if (x.is_negative() || x > kOne)
      throw domain_error("coefficient set element outside [0,1]");
  CoefficientSet set;
  set.elements_ = std::move(elements);
  if (dcc_floor) {
    if (!dcc_floor->is_positive())
      throw domain_error("declared coefficient floor must be positive");
    if (set.has_nonzero() && set.min_nonzero() < *dcc_floor)
      throw domain_error("coefficient below the declared floor");
    set.dcc_floor_ = std::move(dcc_floor);
  }
  return set;
}

bool CoefficientSet::has_nonzero() const {
  return !elements_.empty() && elements_.back().is_positive();
}

const Rational& CoefficientSet::min_nonzero() const {
  for (const Rational& x : elements_)
    if (x.is_positive()) return x;
  throw domain_error("coefficient set has no nonzero element");
}

const Rational& CoefficientSet::effective_floor() const {
  if (dcc_floor_) return *dcc_floor_;
  return min_nonzero();
}

Rational RoundedCoefficients::apply(const Rational& a) const {
  if (a.is_zero()) return a;
  for (const auto& [from, to] : map)
    if (from == a) return to;
  throw domain_error("coefficient " + a.str() + " not in the rounded set");
}

RoundedCoefficients round_coefficients(const CoefficientSet& set,
                                       const Rational& delta) {
  if (!delta.is_positive() || delta >= kOne)
    throw domain_error("rounding margin must lie strictly between 0 and 1");
  if (!set.has_nonzero())
    throw domain_error("rounding needs at least one nonzero coefficient");

  const Rational& a = set.effective_floor();
  RoundedCoefficients out;
  out.grid = (kOne / (a * delta)).ceil();
  Rational k{out.grid};
  for (const Rational& x : set.elements()) {
    if (!x.is_positive()) continue;
    Rational rounded{(k * x).floor(), out.grid};
    // k >= 1/(x*delta) for every x >= a, hence k*x*delta >= 1 > k*x-floor(k*x)
    // and the strict lower bound (1-delta)*x < rounded holds exactly.
    out.map.emplace_back(x, std::move(rounded));
  }
  return out;
}

}  // namespace logsurf
