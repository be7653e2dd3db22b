#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fql/field.hpp"
#include "fql/rational.hpp"

namespace fql {

/// Truncated element of F_Q((x^(1/e))).
///
/// Terms are stored sparsely as (n, c) meaning c * x^(n/e), strictly
/// increasing in n, with no zero coefficients. Every exponent is below the
/// absolute precision: all coefficients of exponents < precision() are known.
/// The precision is an exact rational, or infinity for an exactly known
/// (finite) sum. The ramification index e is kept minimal: exponents and e
/// are divided by their common gcd after every operation.
///
/// Precision propagation:
///   a +- b : min(prec a, prec b)
///   a * b  : min(prec a + val b, prec b + val a)
///   a / b  : min(prec a - val b, prec b + val a - 2 val b)
/// where the valuation of a zero series is its precision.
class Series {
 public:
  struct Term {
    std::int64_t exp;
    FieldElem coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  static Series zero(FieldPtr field, Rational prec = Rational::infinity());
  static Series constant(FieldPtr field, FieldElem c, Rational prec = Rational::infinity());
  static Series from_int(FieldPtr field, std::int64_t k, Rational prec = Rational::infinity());
  static Series monomial(FieldPtr field, FieldElem c, const Rational& exponent,
                         Rational prec = Rational::infinity());
  /// The uniformizer x.
  static Series x(FieldPtr field);
  /// Sorts, merges duplicate exponents, drops zeros and terms at or above prec.
  static Series from_terms(FieldPtr field, std::int64_t e, std::vector<Term> terms, Rational prec);

  const FieldPtr& field() const { return field_; }
  const FieldDesc& desc() const { return *field_; }
  std::int64_t ramification() const { return e_; }
  const std::vector<Term>& terms() const { return terms_; }
  const Rational& precision() const { return prec_; }
  bool is_exact() const { return prec_.is_infinite(); }
  /// Zero to the available precision.
  bool is_zero() const { return terms_.empty(); }

  /// Least exponent; for a zero series, its precision.
  Rational valuation() const;
  /// Absolute precision minus valuation (infinite for exact nonzero series).
  Rational relative_precision() const;
  FieldElem leading_coeff() const;
  Rational exponent(const Term& t) const { return Rational(t.exp, e_); }
  Rational max_exponent() const;
  FieldElem coeff_at(const Rational& exponent) const;

  /// Exact, integral exponents >= 0, coefficients in F_q: an element of F_q[x].
  bool is_fq_polynomial() const;
  /// Nonnegative valuation, i.e. |s| <= 1.
  bool is_integral() const { return valuation() >= Rational(0); }

  Series operator-() const;
  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  Series& operator*=(const Series& o);
  Series& operator/=(const Series& o);
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(const Series& a, const Series& b);
  /// Throws PrecisionError when b is zero to its precision, or when both
  /// operands are exact and the quotient is not a finite sum.
  friend Series operator/(const Series& a, const Series& b);

  Series scaled(FieldElem c) const;
  /// Drops terms at or above prec and lowers the precision to prec.
  Series truncated(const Rational& prec) const;
  /// s^(q^k), coefficientwise. Negative k takes q^|k|-th roots and grows e.
  Series frobenius(std::int64_t k) const;
  /// s * x^r.
  Series shifted(const Rational& r) const;
  Series pow(std::uint64_t n) const;

  /// Structural equality: same field, ramification, terms, and precision.
  friend bool operator==(const Series& a, const Series& b);

  /// Human-readable form, e.g. "x^2 + 2*x + O(x^10)".
  std::string to_string() const;

 private:
  Series(FieldPtr field, std::int64_t e, std::vector<Term> terms, Rational prec)
      : field_(std::move(field)), e_(e), terms_(std::move(terms)), prec_(prec) {}
  void normalize();

  FieldPtr field_;
  std::int64_t e_ = 1;
  std::vector<Term> terms_;
  Rational prec_ = Rational::infinity();
};

inline Series frobenius(const Series& s, std::int64_t k) { return s.frobenius(k); }

/// Lowest exponent index (in units of 1/e) that is not known: exponents n
/// with n < cutoff(prec, e) are below prec. INT64_MAX for infinite prec.
std::int64_t precision_cutoff(const Rational& prec, std::int64_t e);

void require_same_field(const FieldDesc& a, const FieldDesc& b);

}  // namespace fql
