#include "logsurf/rational.hpp"

#include <ostream>

#include "logsurf/errors.hpp"

namespace logsurf {

Rational::Rational(BigInt num, BigInt den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw domain_error("rational with zero denominator");
  reduce();
}

void Rational::reduce() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = 1;
    return;
  }
  BigInt g = boost::multiprecision::gcd(boost::multiprecision::abs(num_), den_);
  if (g != 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::optional<Rational> Rational::parse(std::string_view text) {
  auto parse_int = [](std::string_view s, bool allow_sign,
                      BigInt& out) -> bool {
    if (s.empty()) return false;
    std::size_t i = 0;
    bool negative = false;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) {
      negative = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) return false;
    for (std::size_t j = i; j < s.size(); ++j)
      if (s[j] < '0' || s[j] > '9') return false;
    out = BigInt(std::string(s.substr(i)));
    if (negative) out = -out;
    return true;
  };
  auto slash = text.find('/');
  BigInt num, den = 1;
  if (slash == std::string_view::npos) {
    if (!parse_int(text, true, num)) return std::nullopt;
  } else {
    if (!parse_int(text.substr(0, slash), true, num)) return std::nullopt;
    if (!parse_int(text.substr(slash + 1), false, den)) return std::nullopt;
    if (den.is_zero()) return std::nullopt;
  }
  return Rational(std::move(num), std::move(den));
}

BigInt Rational::floor() const {
  BigInt q = num_ / den_;  // truncates toward zero
  if (num_ < 0 && q * den_ != num_) --q;
  return q;
}

BigInt Rational::ceil() const {
  BigInt q = num_ / den_;
  if (num_ > 0 && q * den_ != num_) ++q;
  return q;
}

Rational Rational::abs() const {
  Rational r = *this;
  if (r.num_ < 0) r.num_ = -r.num_;
  return r;
}

std::string Rational::str() const {
  std::string s = num_.str();
  if (den_ != 1) {
    s += '/';
    s += den_.str();
  }
  return s;
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ *= o.den_;
  reduce();
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  num_ = num_ * o.den_ - o.num_ * den_;
  den_ *= o.den_;
  reduce();
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  num_ *= o.num_;
  den_ *= o.den_;
  reduce();
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_.is_zero()) throw domain_error("rational division by zero");
  num_ *= o.den_;
  den_ *= o.num_;
  reduce();
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  BigInt lhs = a.num_ * b.den_;
  BigInt rhs = b.num_ * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.str();
}

}  // namespace logsurf
