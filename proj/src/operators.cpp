#include "fql/operators.hpp"

#include "fql/carlitz.hpp"
#include "fql/error.hpp"

namespace fql {

namespace {

Series zero_like(const Series& s) { return Series::zero(s.field()); }
SeriesMatrix zero_like(const SeriesMatrix& m) { return SeriesMatrix(m.field(), m.rows(), m.cols()); }

const FieldDesc& field_of(const Series& s) { return s.desc(); }
const FieldDesc& field_of(const SeriesMatrix& m) { return *m.field(); }

ValuationLaw shift_termination(const ValuationLaw& law, std::int64_t delta) {
  if (law.kind != ValuationLaw::Kind::terminating) return {};
  return ValuationLaw::terminating(std::max<std::int64_t>(0, law.start + delta));
}

}  // namespace

template <class C>
CarlitzExpansion<C> carlitz_delta(const CarlitzExpansion<C>& c) {
  CarlitzExpansion<C> out{c.field, {}, shift_termination(c.law, 0)};
  const std::size_t n = c.size();
  if (n == 0) return out;
  const std::size_t len = c.terminates() ? n : n - 1;
  for (std::size_t j = 0; j < len; ++j) {
    C next = j + 1 < n ? c[j + 1] : zero_like(c[j]);
    out.coeffs.push_back(next + bracket(c.field, static_cast<std::int64_t>(j), bracket_cap(c[j])) * c[j]);
  }
  return out;
}

template <class C>
CarlitzExpansion<C> carlitz_d(const CarlitzExpansion<C>& c) {
  CarlitzExpansion<C> out{c.field, {}, shift_termination(c.law, -1)};
  for (std::size_t j = 0; j + 1 < c.size(); ++j) out.coeffs.push_back(frobenius(c[j + 1], -1));
  return out;
}

template <class C>
CarlitzExpansion<C> carlitz_tau(const CarlitzExpansion<C>& c) {
  CarlitzExpansion<C> out{c.field, {}, shift_termination(c.law, 1)};
  const std::size_t n = c.size();
  for (std::size_t j = 0; j < n; ++j) {
    C v = frobenius(c[j], 1);
    if (j > 0) {
      const C prev = frobenius(c[j - 1], 1);
      v += bracket(c.field, static_cast<std::int64_t>(j), bracket_cap(prev)) * prev;
    }
    out.coeffs.push_back(std::move(v));
  }
  if (c.terminates() && n > 0) {
    const C prev = frobenius(c[n - 1], 1);
    out.coeffs.push_back(bracket(c.field, static_cast<std::int64_t>(n), bracket_cap(prev)) * prev);
  }
  if (c.terminates()) out.law = ValuationLaw::terminating(static_cast<std::int64_t>(out.coeffs.size()));
  return out;
}

template <class C>
C carlitz_eval(const CarlitzExpansion<C>& c, const Series& t, const Rational& prec, bool tail_bound) {
  if (c.size() == 0) throw std::invalid_argument("evaluation of an empty Carlitz expansion");
  if (t.valuation() < Rational(0))
    throw DomainError("Carlitz expansions are evaluated on |t| <= 1, but val(t) = " + t.valuation().str());
  require_same_field(*c.field, t.desc());
  const std::int64_t N = static_cast<std::int64_t>(c.size()) - 1;
  const std::uint32_t q = field_of(c[0]).q();

  if (t.is_fq_polynomial()) {
    C acc = zero_like(c[0]);
    if (t.is_zero()) return acc;
    const std::int64_t deg = t.max_exponent().num();
    const std::int64_t top = std::min(N, deg);
    const auto f = f_values(t, static_cast<int>(top));
    for (std::int64_t i = 0; i <= top; ++i) acc += f[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
    if (deg <= N || c.terminates()) return acc;
    auto bound = c.law.tail_lower_bound(N + 1, q);
    if (!bound)
      throw PrecisionError("point of F_q[x] of degree " + std::to_string(deg) + " needs coefficients up to index " +
                           std::to_string(deg) + ", only " + std::to_string(N) + " are available");
    if (tail_bound && bound->is_finite()) return acc.truncated(*bound);
    return acc;
  }

  if (c.strongly_singular_law())
    throw DomainError(
        "expansion is strongly singular: its Carlitz series diverges at every point of O outside F_q[x]");
  const auto f = f_values(t, static_cast<int>(N), prec);
  C acc = zero_like(c[0]);
  for (std::int64_t i = 0; i <= N; ++i) acc += f[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
  Rational cap = prec;
  if (tail_bound && !c.terminates()) {
    if (auto bound = c.law.tail_lower_bound(N + 1, q)) cap = min(cap, *bound);
  }
  return cap.is_infinite() ? acc : acc.truncated(cap);
}

template CarlitzCoeffs carlitz_delta(const CarlitzCoeffs&);
template CarlitzMatrixCoeffs carlitz_delta(const CarlitzMatrixCoeffs&);
template CarlitzCoeffs carlitz_d(const CarlitzCoeffs&);
template CarlitzMatrixCoeffs carlitz_d(const CarlitzMatrixCoeffs&);
template CarlitzCoeffs carlitz_tau(const CarlitzCoeffs&);
template CarlitzMatrixCoeffs carlitz_tau(const CarlitzMatrixCoeffs&);
template Series carlitz_eval(const CarlitzCoeffs&, const Series&, const Rational&, bool);
template SeriesMatrix carlitz_eval(const CarlitzMatrixCoeffs&, const Series&, const Rational&, bool);

Series LinearPowerSeries::eval(const Series& t) const {
  Series acc = Series::zero(field);
  for (std::size_t k = 0; k < coeffs.size(); ++k) acc += coeffs[k] * t.frobenius(static_cast<std::int64_t>(k));
  return acc;
}

LinearPowerSeries linear_delta(const LinearPowerSeries& a) {
  LinearPowerSeries out{a.field, {}};
  for (std::size_t k = 0; k < a.coeffs.size(); ++k)
    out.coeffs.push_back(bracket(a.field, static_cast<std::int64_t>(k), bracket_cap(a.coeffs[k])) * a.coeffs[k]);
  return out;
}

LinearPowerSeries linear_d(const LinearPowerSeries& a) {
  LinearPowerSeries out{a.field, {}};
  for (std::size_t k = 0; k + 1 < a.coeffs.size(); ++k)
    out.coeffs.push_back(
        (bracket(a.field, static_cast<std::int64_t>(k + 1), bracket_cap(a.coeffs[k + 1])) * a.coeffs[k + 1])
            .frobenius(-1));
  return out;
}

SeriesMatrix apply_P(const std::vector<SeriesMatrix>& pi, const SeriesMatrix& u) {
  if (pi.empty()) throw std::invalid_argument("apply_P needs at least pi_0");
  SeriesMatrix acc = pi[0] * u;
  for (std::size_t k = 1; k < pi.size(); ++k) acc += pi[k] * u.frobenius(static_cast<std::int64_t>(k));
  return acc;
}

namespace {

template <class Fn>
Fn delta_of(Fn u) {
  return [u = std::move(u)](const Series& t) {
    const Series x = Series::x(t.field());
    return u(x * t) - x * u(t);
  };
}

}  // namespace

PointFn pointwise_delta(PointFn u) { return delta_of(std::move(u)); }
MatrixPointFn pointwise_delta(MatrixPointFn u) { return delta_of(std::move(u)); }

PointFn pointwise_d(PointFn u) {
  return [v = pointwise_delta(std::move(u))](const Series& t) { return v(t).frobenius(-1); };
}
MatrixPointFn pointwise_d(MatrixPointFn u) {
  return [v = pointwise_delta(std::move(u))](const Series& t) { return v(t).frobenius(-1); };
}

PointFn pointwise_tau(PointFn u) {
  return [u = std::move(u)](const Series& t) { return u(t).frobenius(1); };
}
MatrixPointFn pointwise_tau(MatrixPointFn u) {
  return [u = std::move(u)](const Series& t) { return u(t).frobenius(1); };
}

}  // namespace fql
