#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace logsurf {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number: arbitrary-precision numerator over a positive
/// arbitrary-precision denominator, always stored reduced. This is the only
/// scalar type used by the geometric core; no floating point enters any
/// computation or serialized value.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(int n) : num_(n), den_(1) {}          // NOLINT: implicit by design
  Rational(long long n) : num_(n), den_(1) {}    // NOLINT
  Rational(BigInt n) : num_(std::move(n)), den_(1) {}  // NOLINT
  /// Reduces to lowest terms and normalizes the sign into the numerator.
  /// Throws domain_error when den == 0.
  Rational(BigInt num, BigInt den);

  /// Parses "p/q" or "p" (optional leading '-' or '+', q > 0 after
  /// normalization). Returns nullopt on any other shape. Non-reduced input
  /// is accepted and canonicalized.
  static std::optional<Rational> parse(std::string_view text);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == 1; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }

  /// Largest integer <= *this.
  BigInt floor() const;
  /// Smallest integer >= *this.
  BigInt ceil() const;
  Rational abs() const;

  /// Canonical form: "p/q", or just "p" for integers.
  std::string str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  /// Throws domain_error on division by zero.
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

 private:
  void reduce();

  BigInt num_;
  BigInt den_;  // > 0
};

}  // namespace logsurf
