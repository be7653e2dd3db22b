#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fql/matrix.hpp"
#include "fql/series.hpp"

namespace fql {

/// Closed-form knowledge about val(c_n) beyond the stored prefix.
///
///   terminating          c_n = 0 for n >= start
///   geometric            val(c_n) = offset + rate (n - start), n >= start
///   carlitz_exponential  val(c_n) = offset + rate (q^n - q^start)/(q - 1), n >= start
///   bounded_below        val(c_n) <= offset for n >= start, so |c_n| >= q^-offset
///   decay_at_least       val(c_n) >= offset + rate (n - start), n >= start
struct ValuationLaw {
  enum class Kind { none, terminating, geometric, carlitz_exponential, bounded_below, decay_at_least };

  Kind kind = Kind::none;
  std::int64_t start = 0;
  Rational offset = 0;
  Rational rate = 0;

  static ValuationLaw terminating(std::int64_t start) { return {Kind::terminating, start, 0, 0}; }
  static ValuationLaw geometric(std::int64_t start, Rational offset, Rational rate) {
    return {Kind::geometric, start, offset, rate};
  }
  static ValuationLaw carlitz_exponential(std::int64_t start, Rational offset, Rational scale) {
    return {Kind::carlitz_exponential, start, offset, scale};
  }
  static ValuationLaw bounded_below(std::int64_t start, Rational offset) {
    return {Kind::bounded_below, start, offset, 0};
  }
  static ValuationLaw decay_at_least(std::int64_t start, Rational offset, Rational rate) {
    return {Kind::decay_at_least, start, offset, rate};
  }

  bool known() const { return kind != Kind::none; }

  /// Exact val(c_n) when the law determines it (infinity for a terminating tail).
  std::optional<Rational> valuation_at(std::int64_t n, std::uint32_t q) const;
  /// A lower bound for val(c_n) valid for every n >= from, if the law gives one.
  std::optional<Rational> tail_lower_bound(std::int64_t from, std::uint32_t q) const;

  std::string kind_name() const;
  static Kind parse_kind(std::string_view name);

  friend bool operator==(const ValuationLaw&, const ValuationLaw&) = default;
};

/// u = sum_i c_i f_i with coefficients c_0..c_N of type C (Series for scalar
/// solutions, SeriesMatrix for matrix solutions).
template <class C>
struct CarlitzExpansion {
  FieldPtr field;
  std::vector<C> coeffs;
  ValuationLaw law;

  std::size_t size() const { return coeffs.size(); }
  const C& operator[](std::size_t i) const { return coeffs[i]; }
  /// All coefficients past the stored ones are known to vanish.
  bool terminates() const {
    return law.kind == ValuationLaw::Kind::terminating && law.start <= static_cast<std::int64_t>(coeffs.size());
  }
  bool strongly_singular_law() const { return law.kind == ValuationLaw::Kind::bounded_below; }

  friend bool operator==(const CarlitzExpansion& a, const CarlitzExpansion& b) {
    return a.field->same_as(*b.field) && a.law == b.law && a.coeffs == b.coeffs;
  }
};

using CarlitzCoeffs = CarlitzExpansion<Series>;
using CarlitzMatrixCoeffs = CarlitzExpansion<SeriesMatrix>;

/// Valuation of a coefficient of either kind.
inline Rational coeff_valuation(const Series& s) { return s.valuation(); }
inline Rational coeff_valuation(const SeriesMatrix& m) { return m.valuation(); }
inline Rational coeff_precision(const Series& s) { return s.precision(); }
inline Rational coeff_precision(const SeriesMatrix& m) { return m.precision(); }
inline bool coeff_is_zero(const Series& s) { return s.is_zero(); }
inline bool coeff_is_zero(const SeriesMatrix& m) { return m.is_zero(); }

/// Precision for a bracket that multiplies c without costing precision:
/// prec(c) - val(c) + 2, or infinity for exact c. An exact zero needs no
/// bracket digits at all.
template <class C>
Rational bracket_cap(const C& c) {
  const Rational p = coeff_precision(c);
  if (p.is_infinite()) return coeff_is_zero(c) ? Rational(2) : p;
  return p - coeff_valuation(c) + Rational(2);
}

}  // namespace fql
