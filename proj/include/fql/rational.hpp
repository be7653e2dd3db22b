#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace fql {

/// Exact rational number with int64 numerator and denominator, plus a single
/// +infinity value used for exact (untruncated) precision. Arithmetic is
/// overflow-checked; overflow throws std::overflow_error.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design of the numeric tower
  Rational(std::int64_t n, std::int64_t d);

  static constexpr Rational infinity() {
    Rational r;
    r.num_ = 1;
    r.den_ = 0;
    return r;
  }

  constexpr bool is_infinite() const { return den_ == 0; }
  constexpr bool is_finite() const { return den_ != 0; }
  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return den_ != 0 && num_ == 0; }

  std::int64_t floor() const;
  std::int64_t ceil() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  /// "n/d" (always with a denominator) or "inf".
  std::string str() const;
  /// Accepts "n", "n/d", "inf".
  static Rational parse(std::string_view text);

  double to_double() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_pow(std::int64_t base, unsigned exp);

}  // namespace fql
