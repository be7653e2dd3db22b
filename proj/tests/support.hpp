#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fql/expansion.hpp"
#include "fql/field.hpp"
#include "fql/matrix.hpp"
#include "fql/series.hpp"

namespace fql::testing {

/// Seeded generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t next() { return rng_(); }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  FieldElem elem(const FieldDesc& f) { return FieldElem{static_cast<std::uint32_t>(rng_() % f.order())}; }
  FieldElem nonzero(const FieldDesc& f) {
    return FieldElem{static_cast<std::uint32_t>(1 + rng_() % (f.order() - 1))};
  }
  FieldElem base_elem(const FieldDesc& f) { return f.base_field()[rng_() % f.base_field().size()]; }

  /// Nonzero element with val = min_val exactly, `terms` further random terms
  /// with integral exponents below prec.
  Series series(const FieldPtr& f, std::int64_t min_val, const Rational& prec, int terms = 6) {
    const std::int64_t top = prec.is_finite() ? prec.ceil() - 1 : min_val + 40;
    std::vector<Series::Term> t{{min_val, nonzero(*f)}};
    for (int k = 0; k < terms && top > min_val; ++k) t.push_back({range(min_val + 1, top), elem(*f)});
    return Series::from_terms(f, 1, std::move(t), prec);
  }

  /// Like series(), with every coefficient in the base field F_q, so that
  /// the result lies in F_q((x)) even over an extension F_(q^f).
  Series base_series(const FieldPtr& f, std::int64_t min_val, const Rational& prec, int terms = 6) {
    const std::int64_t top = prec.is_finite() ? prec.ceil() - 1 : min_val + 40;
    FieldElem lead = base_elem(*f);
    while (lead.is_zero()) lead = base_elem(*f);
    std::vector<Series::Term> t{{min_val, lead}};
    for (int k = 0; k < terms && top > min_val; ++k) t.push_back({range(min_val + 1, top), base_elem(*f)});
    return Series::from_terms(f, 1, std::move(t), prec);
  }

  /// Element of F_q[x] with degree exactly deg (or 0 when deg < 0).
  Series fq_poly(const FieldPtr& f, int deg) {
    if (deg < 0) return Series::zero(f);
    std::vector<Series::Term> t;
    for (int k = 0; k < deg; ++k) t.push_back({k, base_elem(*f)});
    FieldElem lead = base_elem(*f);
    while (lead.is_zero()) lead = base_elem(*f);
    t.push_back({deg, lead});
    return Series::from_terms(f, 1, std::move(t), Rational::infinity());
  }

  SeriesMatrix matrix(const FieldPtr& f, std::size_t r, std::size_t c, std::int64_t min_val, const Rational& prec) {
    std::vector<Series> entries;
    for (std::size_t k = 0; k < r * c; ++k) entries.push_back(series(f, min_val + range(0, 1), prec, 4));
    return SeriesMatrix::from_entries(f, r, c, std::move(entries));
  }

 private:
  std::mt19937_64 rng_;
};

/// c_0..c_j = (0, ..., 0, 1): the expansion of f_j.
inline CarlitzCoeffs indicator(const FieldPtr& f, std::size_t j) {
  CarlitzCoeffs c{f, std::vector<Series>(j + 1, Series::zero(f)), ValuationLaw::terminating(static_cast<std::int64_t>(j + 1))};
  c.coeffs[j] = Series::from_int(f, 1);
  return c;
}

}  // namespace fql::testing

#if defined(DOCTEST_LIBRARY_INCLUDED)
namespace doctest {
template <>
struct StringMaker<fql::Rational> {
  static String convert(const fql::Rational& r) { return r.str().c_str(); }
};
template <>
struct StringMaker<fql::Series> {
  static String convert(const fql::Series& s) { return s.to_string().c_str(); }
};
}  // namespace doctest
#endif
