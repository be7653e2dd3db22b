#include "fql/roots.hpp"

#include "fql/error.hpp"

namespace fql {

Series sqrt(const Series& s, const Rational& cap) {
  const FieldDesc& d = s.desc();
  if (d.p() == 2) throw DomainError("square roots are unsupported in characteristic 2");
  if (s.is_zero()) throw PrecisionError("square root of a series that is zero to precision " + s.precision().str());

  const Rational v = s.valuation();
  const FieldElem lead = s.leading_coeff();
  const auto root_lead = d.sqrt(lead);
  if (!root_lead)
    throw FieldExtensionError("leading coefficient " + d.coords_string(lead) +
                              " is not a square in F_Q; rerun with a larger extension degree f");
  const Rational half_v = v / Rational(2);

  Series unit = s.shifted(-v).scaled(d.inv(lead));
  if (unit.terms().size() == 1) {
    return Series::monomial(s.field(), *root_lead, half_v, s.precision() - half_v);
  }

  const Rational prec = min(s.precision(), cap);
  if (prec.is_infinite())
    throw PrecisionError("square root of an exact series is not a finite sum; supply a working precision");
  const Rational rel = prec - v;
  unit = unit.truncated(rel);

  const FieldElem inv2 = d.inv(d.from_int(2));
  Series r = Series::from_int(s.field(), 1, rel);
  for (int iter = 0; iter < 256; ++iter) {
    Series next = ((r + unit / r).scaled(inv2)).truncated(rel);
    if (next == r) break;
    r = std::move(next);
  }
  Series root = r.scaled(*root_lead).shifted(half_v);

  if (s.is_exact()) {
    Series exact = Series::from_terms(s.field(), root.ramification(), root.terms(), Rational::infinity());
    if (exact * exact == s) return exact;
  }
  return root;
}

Series artin_schreier_small_root(const Series& v, const Rational& cap) {
  const FieldDesc& d = v.desc();
  if (v.valuation() <= Rational(0))
    throw DomainError("Artin-Schreier step needs |v| < 1, but val(v) = " + v.valuation().str());
  if (v.is_zero()) {
    if (v.is_exact()) return v;
    return Series::zero(v.field(), v.precision() * Rational(d.q()));
  }
  const Rational pv = v.is_exact() ? cap : v.precision();
  if (pv.is_infinite())
    throw PrecisionError("Artin-Schreier root of an exact series is not a finite sum; supply a working precision");
  const Rational target = pv * Rational(d.q());

  Series z = Series::zero(v.field(), target);
  for (std::int64_t k = 1;; ++k) {
    Series term = v.frobenius(k);
    if (term.valuation() >= target) break;
    z += term;
  }
  return z;
}

std::vector<Series> artin_schreier_roots(const Series& v, const Rational& cap) {
  const Series z0 = artin_schreier_small_root(v, cap);
  std::vector<Series> out;
  for (FieldElem theta : v.desc().base_field()) out.push_back(z0 + Series::constant(v.field(), theta));
  return out;
}

}  // namespace fql
