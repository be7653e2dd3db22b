#include "fql/analysis.hpp"

#include <stdexcept>

#include "fql/carlitz.hpp"
#include "fql/error.hpp"
#include "fql/operators.hpp"

namespace fql {

const char* regularity_name(Regularity r) {
  switch (r) {
    case Regularity::analytic:
      return "analytic";
    case Regularity::locally_analytic:
      return "locally_analytic";
    case Regularity::continuous:
      return "continuous";
    case Regularity::strongly_singular:
      return "strongly_singular";
    case Regularity::inconclusive:
      break;
  }
  return "inconclusive";
}

const char* mode_name(EvidenceMode m) {
  switch (m) {
    case EvidenceMode::exact_formula:
      return "exact_formula";
    case EvidenceMode::lower_bound:
      return "lower_bound";
    case EvidenceMode::heuristic:
      break;
  }
  return "heuristic";
}

std::int64_t ball_exponent(const Rational& gamma, std::uint32_t q) {
  if (gamma.is_infinite()) return 0;
  if (gamma <= Rational(0)) throw std::invalid_argument("ball exponent needs gamma > 0");
  // y = 1 / ((q-1) gamma); l = floor(log_q y) + 1 when y >= 1, else 0.
  const Rational y = Rational(1) / (Rational(q - 1) * gamma);
  if (y < Rational(1)) return 0;
  std::int64_t k = 0;
  Rational power = Rational(q);
  while (power <= y) {
    ++k;
    power *= Rational(q);
  }
  return k + 1;
}

namespace {

constexpr std::size_t kMinHeuristicLength = 8;

template <class C>
std::uint32_t q_of(const CarlitzExpansion<C>& c) {
  return c.field->q();
}

template <class C>
std::vector<ValuationEntry> evidence_of(const CarlitzExpansion<C>& c) {
  std::vector<ValuationEntry> out;
  for (std::size_t n = 0; n < c.size(); ++n)
    out.push_back({static_cast<std::int64_t>(n), coeff_valuation(c[n]), coeff_is_zero(c[n])});
  return out;
}

/// Observed tail: the second half of the stored prefix.
std::size_t tail_start(std::size_t n) { return n / 2; }

}  // namespace

template <class C>
GammaEstimate gamma_estimate(const CarlitzExpansion<C>& c) {
  using K = ValuationLaw::Kind;
  const std::uint32_t q = q_of(c);
  switch (c.law.kind) {
    case K::terminating:
      return {Rational::infinity(), EvidenceMode::exact_formula, true};
    case K::carlitz_exponential:
      return {c.law.rate / Rational(q - 1), EvidenceMode::exact_formula, true};
    case K::geometric:
      return {Rational(0), EvidenceMode::exact_formula, true};
    case K::decay_at_least:
      if (c.law.rate >= Rational(0)) return {Rational(0), EvidenceMode::lower_bound, false};
      return {};
    case K::bounded_below:
      return {std::nullopt, EvidenceMode::exact_formula, false};
    case K::none:
      break;
  }
  if (c.size() < kMinHeuristicLength) return {};
  std::optional<Rational> best;
  Rational qn = 1;
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (n >= tail_start(c.size()) && !coeff_is_zero(c[n])) {
      const Rational v = coeff_valuation(c[n]) / qn;
      if (!best || v < *best) best = v;
    }
    qn *= Rational(q);
  }
  return {best, EvidenceMode::heuristic, false};
}

template <class C>
SingularityVerdict strong_singularity_test(const CarlitzExpansion<C>& c) {
  using K = ValuationLaw::Kind;
  using A = SingularityVerdict::Answer;
  SingularityVerdict out;
  switch (c.law.kind) {
    case K::bounded_below:
      return {A::yes, EvidenceMode::exact_formula, c.law.offset, c.law.start};
    case K::geometric:
      if (c.law.rate <= Rational(0)) {
        const Rational rho = c.law.offset;
        return {A::yes, EvidenceMode::exact_formula, rho, c.law.start};
      }
      return {A::no, EvidenceMode::exact_formula, std::nullopt, std::nullopt};
    case K::terminating:
    case K::carlitz_exponential:
      if (c.law.kind == K::carlitz_exponential && c.law.rate <= Rational(0))
        return {A::yes, EvidenceMode::exact_formula, c.law.offset, c.law.start};
      return {A::no, EvidenceMode::exact_formula, std::nullopt, std::nullopt};
    case K::decay_at_least:
      if (c.law.rate > Rational(0)) return {A::no, EvidenceMode::lower_bound, std::nullopt, std::nullopt};
      return out;
    case K::none:
      break;
  }
  if (c.size() < kMinHeuristicLength) return out;
  const std::size_t n0 = tail_start(c.size());
  const Rational first = coeff_valuation(c[n0]);
  for (std::size_t n = n0; n < c.size(); ++n) {
    if (coeff_is_zero(c[n]) || coeff_valuation(c[n]) > first) return out;
  }
  return {A::yes, EvidenceMode::heuristic, first, static_cast<std::int64_t>(n0)};
}

template <class C>
RegularityReport classify(const CarlitzExpansion<C>& c) {
  using K = ValuationLaw::Kind;
  const std::uint32_t q = q_of(c);
  RegularityReport r;
  r.evidence = evidence_of(c);
  const GammaEstimate g = gamma_estimate(c);
  const SingularityVerdict s = strong_singularity_test(c);
  r.gamma = g.gamma;
  r.mode = g.mode;

  if (s.answer == SingularityVerdict::Answer::yes) {
    r.cls = Regularity::strongly_singular;
    r.mode = s.mode;
    r.rho_val = s.rho_val;
    r.i0 = s.i0;
    const Rational& rho = *s.rho_val;
    const std::string bound = rho.is_zero() ? "1"
                              : rho.den() == 1 ? "q^-" + std::to_string(rho.num())
                                               : "q^(-" + rho.str() + ")";
    r.note = "|c_n| >= " + bound + " for n >= " + std::to_string(*s.i0) + "; the series converges only on F_q[x]";
    return r;
  }

  switch (c.law.kind) {
    case K::terminating:
      r.cls = Regularity::analytic;
      r.ball_exponent = 0;
      r.note = "finitely many nonzero coefficients: an F_q-linear polynomial";
      return r;
    case K::carlitz_exponential: {
      const std::int64_t l = ball_exponent(*g.gamma, q);
      r.ball_exponent = l;
      r.cls = l == 0 ? Regularity::analytic : Regularity::locally_analytic;
      r.note = "gamma = " + g.gamma->str() + " > 0";
      return r;
    }
    case K::geometric:
      r.cls = Regularity::continuous;
      r.note = "coefficients decay geometrically, gamma = 0: continuous but not locally analytic";
      return r;
    case K::decay_at_least:
      r.cls = Regularity::continuous;
      r.note = "coefficients tend to 0 (lower bound only): at least continuous";
      return r;
    case K::bounded_below:
    case K::none:
      break;
  }

  if (c.size() < kMinHeuristicLength) {
    r.cls = Regularity::inconclusive;
    r.note = "fewer than " + std::to_string(kMinHeuristicLength) + " coefficients and no valuation formula";
    return r;
  }
  r.cls = Regularity::inconclusive;
  r.note = "finite prefix only; the liminf defining gamma is not decided by finitely many coefficients";
  return r;
}

template GammaEstimate gamma_estimate(const CarlitzCoeffs&);
template GammaEstimate gamma_estimate(const CarlitzMatrixCoeffs&);
template SingularityVerdict strong_singularity_test(const CarlitzCoeffs&);
template SingularityVerdict strong_singularity_test(const CarlitzMatrixCoeffs&);
template RegularityReport classify(const CarlitzCoeffs&);
template RegularityReport classify(const CarlitzMatrixCoeffs&);

int equation_order(const ScalarEquation& eq) {
  return std::visit(
      [](const auto& e) -> int {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ModelEq>) {
          return 1;
        } else if constexpr (std::is_same_v<T, EulerEq>) {
          if (e.b.empty()) throw std::invalid_argument("Euler equation needs at least b_0");
          return static_cast<int>(e.b.size());
        } else {
          return 2;
        }
      },
      eq);
}

int equation_order(const MatrixEquation&) { return 1; }

namespace {

template <class C>
C times_bracket(const FieldPtr& field, std::int64_t j, const C& c) {
  return bracket(field, j, bracket_cap(c)) * c;
}

template <class C>
CarlitzExpansion<C> minus_bracket_times(const CarlitzExpansion<C>& a, const CarlitzExpansion<C>& c, std::int64_t j) {
  const std::size_t n = std::min(a.size(), c.size());
  CarlitzExpansion<C> out{a.field, {}, a.law};
  for (std::size_t i = 0; i < n; ++i) out.coeffs.push_back(a[i] - times_bracket(a.field, j, c[i]));
  return out;
}

CarlitzCoeffs without_law(CarlitzCoeffs c) {
  c.law = {};
  return c;
}
CarlitzMatrixCoeffs without_law(CarlitzMatrixCoeffs c) {
  c.law = {};
  return c;
}

template <class C>
CarlitzExpansion<C> tau_d_power(const CarlitzExpansion<C>& c, int k) {
  CarlitzExpansion<C> out = c;
  for (int i = 0; i < k; ++i) out = carlitz_d(out);
  for (int i = 0; i < k; ++i) out = carlitz_tau(out);
  return out;
}

Rational eval_precision(const Rational& prec, std::uint32_t q) {
  if (prec.is_infinite()) return prec;
  return Rational(q) * prec + Rational(20);
}

void require_points_precision(const Series& t, const Rational& prec) {
  if (prec.is_infinite() && !t.is_fq_polynomial())
    throw std::invalid_argument("points outside F_q[x] need a finite target precision");
}

template <class R>
ResidualReport build_report(const std::vector<R>& coeff_res, int order, const Rational& prec,
                            const std::vector<Rational>& point_vals) {
  ResidualReport rep;
  rep.threshold = prec.is_infinite() ? prec : prec - Rational(residual_slack(order));
  for (std::size_t j = 0; j < coeff_res.size(); ++j) {
    const Rational v = coeff_valuation(coeff_res[j]);
    const bool ok = v >= rep.threshold;
    const std::int64_t idx = static_cast<std::int64_t>(j) + order;
    rep.coefficientwise.push_back({idx, v, ok});
    if (!ok) {
      rep.pass = false;
      if (!rep.first_failure) rep.first_failure = idx;
    }
  }
  for (std::size_t i = 0; i < point_vals.size(); ++i) {
    const bool ok = point_vals[i] >= rep.threshold;
    rep.pointwise.push_back({static_cast<std::int64_t>(i), point_vals[i], ok});
    if (!ok) rep.pass = false;
  }
  return rep;
}

}  // namespace

std::vector<Series> coefficient_residuals(const ScalarEquation& eq, const CarlitzCoeffs& c_in) {
  const CarlitzCoeffs c = without_law(c_in);
  return std::visit(
      [&](const auto& e) -> std::vector<Series> {
        using T = std::decay_t<decltype(e)>;
        std::vector<Series> out;
        if constexpr (std::is_same_v<T, ModelEq>) {
          const CarlitzCoeffs dc = carlitz_delta(c);
          for (std::size_t j = 0; j < dc.size(); ++j) out.push_back(dc[j] - e.lambda * c[j]);
        } else if constexpr (std::is_same_v<T, EulerEq>) {
          const int m = equation_order(eq);
          std::vector<CarlitzCoeffs> terms;
          for (int k = 0; k <= m; ++k) terms.push_back(tau_d_power(c, k));
          std::size_t len = terms[0].size();
          for (const auto& t : terms) len = std::min(len, t.size());
          for (std::size_t j = 0; j < len; ++j) {
            Series acc = terms[static_cast<std::size_t>(m)][j];
            for (int k = 0; k < m; ++k) acc += e.b[static_cast<std::size_t>(k)] * terms[static_cast<std::size_t>(k)][j];
            out.push_back(acc);
          }
        } else {
          const CarlitzCoeffs dc = carlitz_delta(c);
          const CarlitzCoeffs inner = minus_bracket_times(dc, c, -e.b);
          const CarlitzCoeffs outer = minus_bracket_times(carlitz_delta(inner), inner, -e.a);
          const CarlitzCoeffs rhs = carlitz_d(dc);
          const std::size_t len = std::min(outer.size(), rhs.size());
          for (std::size_t j = 0; j < len; ++j) out.push_back(outer[j] - rhs[j]);
        }
        return out;
      },
      eq);
}

std::vector<SeriesMatrix> coefficient_residuals(const MatrixEquation& eq, const CarlitzMatrixCoeffs& c_in) {
  const CarlitzMatrixCoeffs c = without_law(c_in);
  return std::visit(
      [&](const auto& e) -> std::vector<SeriesMatrix> {
        using T = std::decay_t<decltype(e)>;
        std::vector<SeriesMatrix> out;
        if constexpr (std::is_same_v<T, ModelMatrixEq>) {
          const CarlitzMatrixCoeffs dc = carlitz_delta(c);
          for (std::size_t j = 0; j < dc.size(); ++j) out.push_back(dc[j] - e.Lambda * c[j]);
        } else {
          const CarlitzMatrixCoeffs td = carlitz_tau(carlitz_d(c));
          for (std::size_t j = 0; j < td.size(); ++j) out.push_back(td[j] - e.B * c[j]);
        }
        return out;
      },
      eq);
}

Series pointwise_residual(const ScalarEquation& eq, const CarlitzCoeffs& c, const Series& t, const Rational& prec) {
  require_points_precision(t, prec);
  const FieldPtr& field = c.field;
  PointFn u = [&c, prec](const Series& s) { return carlitz_eval(c, s, prec); };
  return std::visit(
      [&](const auto& e) -> Series {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ModelEq>) {
          return pointwise_delta(u)(t) - e.lambda * u(t);
        } else if constexpr (std::is_same_v<T, EulerEq>) {
          const int m = equation_order(eq);
          Series acc = Series::zero(field);
          for (int k = 0; k <= m; ++k) {
            PointFn g = u;
            for (int i = 0; i < k; ++i) g = pointwise_d(g);
            for (int i = 0; i < k; ++i) g = pointwise_tau(g);
            const Series term = g(t);
            acc += k == m ? term : e.b[static_cast<std::size_t>(k)] * term;
          }
          return acc;
        } else {
          const Series bb = bracket(field, -e.b);
          const Series ba = bracket(field, -e.a);
          const PointFn du = pointwise_delta(u);
          const PointFn inner = [du, u, bb](const Series& s) { return du(s) - bb * u(s); };
          const PointFn dinner = pointwise_delta(inner);
          const Series lhs = dinner(t) - ba * inner(t);
          return lhs - pointwise_d(du)(t);
        }
      },
      eq);
}

SeriesMatrix pointwise_residual(const MatrixEquation& eq, const CarlitzMatrixCoeffs& c, const Series& t,
                                const Rational& prec) {
  require_points_precision(t, prec);
  MatrixPointFn u = [&c, prec](const Series& s) { return carlitz_eval(c, s, prec); };
  const SeriesMatrix ut = u(t);
  const SeriesMatrix lhs = std::holds_alternative<ModelMatrixEq>(eq)
                               ? pointwise_delta(u)(t)
                               : pointwise_tau(pointwise_d(u))(t);
  const SeriesMatrix& A =
      std::holds_alternative<ModelMatrixEq>(eq) ? std::get<ModelMatrixEq>(eq).Lambda : std::get<FirstOrderMatrixEq>(eq).B;
  return lhs - A * ut;
}

SeriesMatrix pointwise_residual(const WSolution& sol, const Series& t, const Rational& prec, int K) {
  require_points_precision(t, prec);
  const Series x = Series::x(t.field());
  const SeriesMatrix ut = eval_regular_solution(sol, t, prec, K);
  const SeriesMatrix uxt = eval_regular_solution(sol, x * t, prec, K);
  return uxt - x * ut - apply_P(sol.pi, ut);
}

ResidualReport residual_check(const ScalarEquation& eq, const CarlitzCoeffs& c, const std::vector<Series>& points,
                              const Rational& prec) {
  const int order = equation_order(eq);
  if (const auto* e = std::get_if<EulerEq>(&eq)) {
    for (const auto& b : e->b) require_same_field(*c.field, b.desc());
  }
  const auto coeff_res = coefficient_residuals(eq, c);
  std::vector<Rational> vals;
  const Rational wp = eval_precision(prec, c.field->q());
  for (const auto& t : points) vals.push_back(pointwise_residual(eq, c, t, wp).valuation());
  return build_report(coeff_res, order, prec, vals);
}

ResidualReport residual_check(const MatrixEquation& eq, const CarlitzMatrixCoeffs& c,
                              const std::vector<Series>& points, const Rational& prec) {
  const auto coeff_res = coefficient_residuals(eq, c);
  std::vector<Rational> vals;
  const Rational wp = eval_precision(prec, c.field->q());
  for (const auto& t : points) vals.push_back(pointwise_residual(eq, c, t, wp).valuation());
  return build_report(coeff_res, equation_order(eq), prec, vals);
}

ResidualReport residual_check(const WSolution& sol, const std::vector<Series>& points, const Rational& prec) {
  std::vector<SeriesMatrix> coeff_res;
  for (std::size_t k = 1; k < sol.w.size(); ++k) coeff_res.push_back(w_equation_residual(sol, static_cast<int>(k)));
  std::vector<Rational> vals;
  for (const auto& t : points) vals.push_back(pointwise_residual(sol, t, prec).valuation());
  // w_k residuals are indexed by k, which equals j + 1.
  return build_report(coeff_res, 1, prec, vals);
}

}  // namespace fql
