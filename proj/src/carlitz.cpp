#include "fql/carlitz.hpp"

#include <stdexcept>

#include "fql/error.hpp"

namespace fql {

Series bracket(const FieldPtr& field, std::int64_t j, const Rational& cap) {
  const Series minus_x = -Series::x(field);
  if (j < 0) {
    const Rational exponent(1, checked_pow(field->q(), static_cast<unsigned>(-j)));
    return Series::monomial(field, field->one(), exponent) + minus_x;
  }
  // q^j, saturating at 2^62.
  constexpr std::int64_t kLimit = std::int64_t{1} << 62;
  std::int64_t pw = 1;
  for (std::int64_t k = 0; k < j && pw < kLimit; ++k) pw = pw > kLimit / field->q() ? kLimit : pw * field->q();
  if (cap.is_finite() && Rational(pw) >= cap) return minus_x.truncated(cap);
  if (pw >= kLimit)
    throw PrecisionError("[" + std::to_string(j) + "] has exponent q^j beyond 2^62 and needs a finite precision");
  return Series::monomial(field, field->one(), Rational(pw)) + minus_x;
}

Factorials factorials(const FieldPtr& field, int i) {
  if (i < 0) throw std::invalid_argument("factorial index must be nonnegative");
  Series D = Series::from_int(field, 1);
  Series L = D;
  for (int k = 1; k <= i; ++k) {
    const Series b = bracket(field, k);
    D = b * D.frobenius(1);
    L = b * L;
  }
  return {std::move(D), std::move(L)};
}

CarlitzContext::CarlitzContext(FieldPtr field, int max_index) : field_(std::move(field)) {
  if (max_index < 0) throw std::invalid_argument("CarlitzContext needs a nonnegative index bound");
  brackets_.push_back(fql::bracket(field_, 0));
  D_.push_back(Series::from_int(field_, 1));
  L_.push_back(D_.back());
  for (int k = 1; k <= max_index; ++k) {
    brackets_.push_back(fql::bracket(field_, k));
    D_.push_back(brackets_.back() * D_.back().frobenius(1));
    L_.push_back(brackets_.back() * L_.back());
  }
}

std::vector<Series> f_values(const Series& t, int n, const Rational& prec) {
  if (n < 0) throw std::invalid_argument("Carlitz polynomial index must be nonnegative");
  if (t.valuation() < Rational(0))
    throw DomainError("Carlitz polynomials are evaluated on |t| <= 1, but val(t) = " + t.valuation().str());
  std::vector<Series> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  if (t.is_fq_polynomial() || prec.is_infinite()) {
    out.push_back(t);
  } else {
    out.push_back(t.truncated(prec + Rational(n + 10)));
  }
  for (int i = 1; i <= n; ++i) {
    const Series& prev = out.back();
    if (prev.is_zero() && prev.is_exact()) {
      out.push_back(prev);
      continue;
    }
    const Series num = prev.frobenius(1) - prev;
    const Rational cap = num.precision().is_finite() ? max(num.precision(), Rational(0)) + Rational(2) : Rational::infinity();
    Series next = num / bracket(t.field(), i, cap);
    // f_i maps O into O, so a value whose precision has run below 0 is still known modulo x^0.
    if (next.precision() < Rational(0)) next = Series::zero(t.field()).truncated(Rational(0));
    out.push_back(std::move(next));
  }
  return out;
}

Series f_eval(int i, const Series& t, const Rational& prec) { return f_values(t, i, prec).back(); }

Series e_eval(int i, const Series& t, EMethod method, const Rational& prec) {
  if (i < 0) throw std::invalid_argument("Carlitz polynomial index must be nonnegative");
  if (method == EMethod::recursion) return factorials(t.field(), i).D * f_eval(i, t, prec);

  if (i > 8) throw std::invalid_argument("product evaluation of e_i is limited to i <= 8 (q^i factors)");
  const FieldPtr& field = t.field();
  const auto& base = field->base_field();
  const std::size_t q = base.size();
  const Series point = (t.is_fq_polynomial() || prec.is_infinite()) ? t : t.truncated(prec + Rational(i + 10));
  std::size_t count = 1;
  for (int k = 0; k < i; ++k) count *= q;

  Series acc = Series::from_int(field, 1);
  std::vector<std::size_t> digits(static_cast<std::size_t>(i), 0);
  for (std::size_t w = 0; w < count; ++w) {
    std::vector<Series::Term> terms;
    for (int k = 0; k < i; ++k) {
      const FieldElem c = base[digits[static_cast<std::size_t>(k)]];
      if (!c.is_zero()) terms.push_back({k, c});
    }
    acc *= point - Series::from_terms(field, 1, std::move(terms), Rational::infinity());
    for (std::size_t k = 0; k < digits.size(); ++k) {
      if (++digits[k] < q) break;
      digits[k] = 0;
    }
  }
  return acc;
}

Series f_at_monomial(const FieldPtr& field, int i, int n) {
  if (n < 0) throw std::invalid_argument("monomial degree must be nonnegative");
  return f_eval(i, Series::monomial(field, field->one(), Rational(n)));
}

}  // namespace fql
