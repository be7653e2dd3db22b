#include "fql/rational.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>

namespace fql {

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

Rational make_reduced(__int128 n, __int128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n;
  __int128 b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  return Rational(narrow(n), narrow(d));
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || first == s.data() + s.size())
    throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  return narrow(static_cast<__int128>(a) * b);
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  return narrow(static_cast<__int128>(a) + b);
}

std::int64_t checked_pow(std::int64_t base, unsigned exp) {
  std::int64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  std::int64_t g = std::gcd(n, d);
  if (d < 0) g = -g;
  num_ = n / g;
  den_ = d / g;
}

std::int64_t Rational::floor() const {
  if (is_infinite()) throw std::domain_error("floor of infinity");
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t Rational::ceil() const {
  if (is_infinite()) throw std::domain_error("ceil of infinity");
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

Rational Rational::operator-() const {
  if (is_infinite()) throw std::domain_error("negation of infinity");
  Rational r;
  r.num_ = narrow(-static_cast<__int128>(num_));
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  if (is_infinite() || o.is_infinite()) return *this = infinity();
  *this = make_reduced(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                       static_cast<__int128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  if (o.is_infinite()) throw std::domain_error("subtraction of infinity");
  if (is_infinite()) return *this;
  *this = make_reduced(static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_,
                       static_cast<__int128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  if (is_infinite() || o.is_infinite()) {
    const Rational& fin = is_infinite() ? o : *this;
    if (fin.is_finite() && fin.num_ <= 0) throw std::domain_error("infinity times non-positive");
    return *this = infinity();
  }
  *this = make_reduced(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_infinite()) throw std::domain_error("division by infinity");
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  if (is_infinite()) {
    if (o.num_ < 0) throw std::domain_error("infinity divided by negative");
    return *this;
  }
  *this = make_reduced(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
    return a.is_infinite() ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  __int128 l = static_cast<__int128>(a.num_) * b.den_;
  __int128 r = static_cast<__int128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::str() const {
  if (is_infinite()) return "inf";
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  if (text == "inf") return infinity();
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

double Rational::to_double() const {
  if (is_infinite()) return __builtin_inf();
  return static_cast<double>(num_) / static_cast<double>(den_);
}

}  // namespace fql
