#include "fql/series.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fql/error.hpp"

namespace fql {

namespace {

constexpr std::int64_t kDenseLimit = std::int64_t{1} << 22;

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return checked_mul(a / std::gcd(a, b), b); }

}  // namespace

std::int64_t precision_cutoff(const Rational& prec, std::int64_t e) {
  if (prec.is_infinite()) return INT64_MAX;
  return Rational(checked_mul(prec.num(), e), prec.den()).ceil();
}

void require_same_field(const FieldDesc& a, const FieldDesc& b) {
  if (!a.same_as(b)) throw std::invalid_argument("series over different coefficient fields");
}

Series Series::zero(FieldPtr field, Rational prec) { return Series(std::move(field), 1, {}, prec); }

Series Series::constant(FieldPtr field, FieldElem c, Rational prec) {
  return monomial(std::move(field), c, Rational(0), prec);
}

Series Series::from_int(FieldPtr field, std::int64_t k, Rational prec) {
  const FieldElem c = field->from_int(k);
  return constant(std::move(field), c, prec);
}

Series Series::monomial(FieldPtr field, FieldElem c, const Rational& exponent, Rational prec) {
  if (exponent.is_infinite()) throw std::invalid_argument("infinite exponent");
  if (c.is_zero() || exponent >= prec) return zero(std::move(field), prec);
  Series s(std::move(field), exponent.den(), {{exponent.num(), c}}, prec);
  return s;
}

Series Series::x(FieldPtr field) { return monomial(field, field->one(), Rational(1)); }

Series Series::from_terms(FieldPtr field, std::int64_t e, std::vector<Term> terms, Rational prec) {
  if (e <= 0) throw std::invalid_argument("ramification index must be positive");
  const FieldDesc& d = *field;
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.exp < b.exp; });
  const std::int64_t cut = precision_cutoff(prec, e);
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    if (t.exp >= cut) break;
    if (!out.empty() && out.back().exp == t.exp) {
      out.back().coeff = d.add(out.back().coeff, t.coeff);
      if (out.back().coeff.is_zero()) out.pop_back();
    } else if (!t.coeff.is_zero()) {
      out.push_back(t);
    }
  }
  Series s(std::move(field), e, std::move(out), prec);
  s.normalize();
  return s;
}

void Series::normalize() {
  std::int64_t g = e_;
  for (const auto& t : terms_) {
    g = std::gcd(g, t.exp < 0 ? -t.exp : t.exp);
    if (g == 1) return;
  }
  if (g <= 1) return;
  for (auto& t : terms_) t.exp /= g;
  e_ /= g;
}

Rational Series::valuation() const {
  if (terms_.empty()) return prec_;
  return Rational(terms_.front().exp, e_);
}

Rational Series::relative_precision() const {
  if (terms_.empty()) return Rational(0);
  return prec_ - valuation();
}

FieldElem Series::leading_coeff() const {
  if (terms_.empty()) return {};
  return terms_.front().coeff;
}

Rational Series::max_exponent() const {
  if (terms_.empty()) throw std::logic_error("max_exponent of a zero series");
  return Rational(terms_.back().exp, e_);
}

FieldElem Series::coeff_at(const Rational& exponent) const {
  const Rational scaled = exponent * Rational(e_);
  if (!scaled.is_integer()) return {};
  const std::int64_t n = scaled.num();
  auto it = std::lower_bound(terms_.begin(), terms_.end(), n, [](const Term& t, std::int64_t v) { return t.exp < v; });
  if (it != terms_.end() && it->exp == n) return it->coeff;
  return {};
}

bool Series::is_fq_polynomial() const {
  if (!is_exact() || e_ != 1) return false;
  if (!terms_.empty() && terms_.front().exp < 0) return false;
  return std::all_of(terms_.begin(), terms_.end(), [&](const Term& t) { return field_->in_base_field(t.coeff); });
}

Series Series::operator-() const {
  Series r = *this;
  for (auto& t : r.terms_) t.coeff = field_->neg(t.coeff);
  return r;
}

namespace {

Series add_impl(const Series& a, const Series& b, bool negate) {
  require_same_field(a.desc(), b.desc());
  const FieldDesc& d = a.desc();
  const Rational prec = min(a.precision(), b.precision());
  const std::int64_t e = lcm64(a.ramification(), b.ramification());
  const std::int64_t fa = e / a.ramification();
  const std::int64_t fb = e / b.ramification();
  const std::int64_t cut = precision_cutoff(prec, e);
  std::vector<Series::Term> out;
  out.reserve(a.terms().size() + b.terms().size());
  auto ia = a.terms().begin(), ea = a.terms().end();
  auto ib = b.terms().begin(), eb = b.terms().end();
  while (ia != ea || ib != eb) {
    const std::int64_t xa = ia != ea ? ia->exp * fa : INT64_MAX;
    const std::int64_t xb = ib != eb ? ib->exp * fb : INT64_MAX;
    const std::int64_t x = std::min(xa, xb);
    if (x >= cut) break;
    FieldElem c{};
    if (xa == x) c = (ia++)->coeff;
    if (xb == x) {
      const FieldElem cb = negate ? d.neg(ib->coeff) : ib->coeff;
      c = d.add(c, cb);
      ++ib;
    }
    if (!c.is_zero()) out.push_back({x, c});
  }
  return Series::from_terms(a.field(), e, std::move(out), prec);
}

}  // namespace

Series& Series::operator+=(const Series& o) { return *this = add_impl(*this, o, false); }
Series& Series::operator-=(const Series& o) { return *this = add_impl(*this, o, true); }
Series& Series::operator*=(const Series& o) { return *this = *this * o; }
Series& Series::operator/=(const Series& o) { return *this = *this / o; }

Series operator*(const Series& a, const Series& b) {
  require_same_field(a.desc(), b.desc());
  const FieldDesc& d = a.desc();
  const Rational prec = min(a.precision() + b.valuation(), b.precision() + a.valuation());
  if (a.is_zero() || b.is_zero()) return Series::zero(a.field(), prec);

  const std::int64_t e = lcm64(a.ramification(), b.ramification());
  const std::int64_t fa = e / a.ramification();
  const std::int64_t fb = e / b.ramification();
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  const std::int64_t lo = checked_add(checked_mul(ta.front().exp, fa), checked_mul(tb.front().exp, fb));
  std::int64_t hi = checked_add(checked_add(checked_mul(ta.back().exp, fa), checked_mul(tb.back().exp, fb)), 1);
  hi = std::min(hi, precision_cutoff(prec, e));
  if (hi <= lo) return Series::zero(a.field(), prec);

  const std::int64_t range = hi - lo;
  const std::int64_t pairs = static_cast<std::int64_t>(ta.size()) * static_cast<std::int64_t>(tb.size());
  std::vector<Series::Term> out;
  if (range <= kDenseLimit && range <= 32 * pairs + 4096) {
    std::vector<FieldElem> acc(static_cast<std::size_t>(range));
    for (const auto& x : ta) {
      const std::int64_t ex = x.exp * fa;
      if (ex + tb.front().exp * fb >= hi) break;
      for (const auto& y : tb) {
        const std::int64_t k = ex + y.exp * fb;
        if (k >= hi) break;
        auto& slot = acc[static_cast<std::size_t>(k - lo)];
        slot = d.add(slot, d.mul(x.coeff, y.coeff));
      }
    }
    for (std::int64_t i = 0; i < range; ++i)
      if (!acc[static_cast<std::size_t>(i)].is_zero()) out.push_back({lo + i, acc[static_cast<std::size_t>(i)]});
    return Series::from_terms(a.field(), e, std::move(out), prec);
  }
  for (const auto& x : ta) {
    const std::int64_t ex = x.exp * fa;
    for (const auto& y : tb) {
      const std::int64_t k = ex + y.exp * fb;
      if (k >= hi) break;
      out.push_back({k, d.mul(x.coeff, y.coeff)});
    }
  }
  return Series::from_terms(a.field(), e, std::move(out), prec);
}

Series operator/(const Series& a, const Series& b) {
  require_same_field(a.desc(), b.desc());
  const FieldDesc& d = a.desc();
  if (b.is_zero())
    throw PrecisionError("division by a series that is zero to precision " + b.precision().str());
  const Rational vb = b.valuation();
  if (a.is_zero()) return Series::zero(a.field(), a.precision() - vb);
  const Rational va = a.valuation();
  const Rational prec = min(a.precision() - vb, b.precision() + va - vb - vb);

  const std::int64_t e = lcm64(a.ramification(), b.ramification());
  const std::int64_t fa = e / a.ramification();
  const std::int64_t fb = e / b.ramification();
  const auto& tb = b.terms();
  const std::int64_t bl = tb.front().exp * fb;
  const FieldElem inv_lead = d.inv(tb.front().coeff);
  std::vector<Series::Term> quot;

  if (prec.is_finite()) {
    const std::int64_t qcut = precision_cutoff(prec, e);
    const std::int64_t rcut = checked_add(qcut, bl);
    const std::int64_t lo = a.terms().front().exp * fa;
    if (rcut <= lo) return Series::zero(a.field(), prec);
    const std::int64_t range = rcut - lo;
    if (range <= kDenseLimit) {
      std::vector<FieldElem> rem(static_cast<std::size_t>(range));
      for (const auto& t : a.terms()) {
        const std::int64_t k = t.exp * fa;
        if (k >= rcut) break;
        rem[static_cast<std::size_t>(k - lo)] = t.coeff;
      }
      for (std::int64_t i = 0; i < range; ++i) {
        const FieldElem r = rem[static_cast<std::size_t>(i)];
        if (r.is_zero()) continue;
        const std::int64_t qe = lo + i - bl;
        const FieldElem qc = d.mul(r, inv_lead);
        quot.push_back({qe, qc});
        for (const auto& t : tb) {
          const std::int64_t k = qe + t.exp * fb;
          if (k >= rcut) break;
          auto& slot = rem[static_cast<std::size_t>(k - lo)];
          slot = d.sub(slot, d.mul(qc, t.coeff));
        }
      }
      return Series::from_terms(a.field(), e, std::move(quot), prec);
    }
  }

  // Sparse long division; also the exact/exact case, which must terminate.
  const bool exact = prec.is_infinite();
  const std::int64_t qcut = exact ? INT64_MAX : precision_cutoff(prec, e);
  const std::int64_t rcut = exact ? INT64_MAX : checked_add(qcut, bl);
  const std::int64_t qmax = exact ? a.terms().back().exp * fa - tb.back().exp * fb : INT64_MAX;
  std::map<std::int64_t, FieldElem> rem;
  for (const auto& t : a.terms()) {
    const std::int64_t k = t.exp * fa;
    if (k >= rcut) break;
    rem.emplace(k, t.coeff);
  }
  while (!rem.empty()) {
    auto it = rem.begin();
    const std::int64_t qe = it->first - bl;
    if (qe >= qcut) break;
    if (qe > qmax)
      throw PrecisionError("exact quotient is not a finite sum; truncate an operand to a finite precision");
    const FieldElem qc = d.mul(it->second, inv_lead);
    quot.push_back({qe, qc});
    for (const auto& t : tb) {
      const std::int64_t k = qe + t.exp * fb;
      if (k >= rcut) break;
      auto [slot, inserted] = rem.emplace(k, FieldElem{});
      slot->second = d.sub(slot->second, d.mul(qc, t.coeff));
      if (slot->second.is_zero()) rem.erase(slot);
    }
  }
  return Series::from_terms(a.field(), e, std::move(quot), prec);
}

Series Series::scaled(FieldElem c) const {
  if (c.is_zero()) return zero(field_, prec_);
  Series r = *this;
  for (auto& t : r.terms_) t.coeff = field_->mul(t.coeff, c);
  return r;
}

Series Series::truncated(const Rational& prec) const {
  if (prec >= prec_) return *this;
  const std::int64_t cut = precision_cutoff(prec, e_);
  std::vector<Term> kept;
  for (const auto& t : terms_) {
    if (t.exp >= cut) break;
    kept.push_back(t);
  }
  Series r(field_, e_, std::move(kept), prec);
  r.normalize();
  return r;
}

Series Series::frobenius(std::int64_t k) const {
  if (k == 0) return *this;
  const std::int64_t factor = checked_pow(field_->q(), static_cast<unsigned>(k < 0 ? -k : k));
  Series r = *this;
  for (auto& t : r.terms_) t.coeff = field_->frobenius(t.coeff, k);
  if (k > 0) {
    for (auto& t : r.terms_) t.exp = checked_mul(t.exp, factor);
    if (prec_.is_finite()) r.prec_ = prec_ * Rational(factor);
  } else {
    r.e_ = checked_mul(e_, factor);
    if (prec_.is_finite()) r.prec_ = prec_ / Rational(factor);
  }
  r.normalize();
  return r;
}

Series Series::shifted(const Rational& r) const {
  if (r.is_zero()) return *this;
  const std::int64_t e = lcm64(e_, r.den());
  const std::int64_t f = e / e_;
  const std::int64_t add = checked_mul(r.num(), e / r.den());
  Series out = *this;
  out.e_ = e;
  for (auto& t : out.terms_) t.exp = checked_add(checked_mul(t.exp, f), add);
  if (prec_.is_finite()) out.prec_ = prec_ + r;
  out.normalize();
  return out;
}

Series Series::pow(std::uint64_t n) const {
  Series result = constant(field_, field_->one());
  Series base = *this;
  while (n) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

bool operator==(const Series& a, const Series& b) {
  return a.desc().same_as(b.desc()) && a.e_ == b.e_ && a.prec_ == b.prec_ && a.terms_ == b.terms_;
}

std::string Series::to_string() const {
  std::string out;
  const FieldDesc& d = *field_;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    const Rational ex(t.exp, e_);
    std::string c = d.degree() == 1 ? std::to_string(t.coeff.code) : "(" + d.coords_string(t.coeff) + ")";
    if (ex.is_zero()) {
      out += c;
      continue;
    }
    if (t.coeff != d.one()) out += c + "*";
    out += "x";
    if (ex == Rational(1)) continue;
    out += ex.is_integer() ? "^" + std::to_string(ex.num()) : "^(" + ex.str() + ")";
  }
  if (prec_.is_finite()) {
    if (!out.empty()) out += " + ";
    out += "O(x^" + (prec_.is_integer() ? std::to_string(prec_.num()) : "(" + prec_.str() + ")") + ")";
  }
  if (out.empty()) out = "0";
  return out;
}

}  // namespace fql
