#include "fql/solvers.hpp"

#include <random>
#include <stdexcept>

#include "fql/carlitz.hpp"
#include "fql/error.hpp"
#include "fql/operators.hpp"
#include "fql/roots.hpp"

namespace fql {

namespace {

// j with lambda == [j] exactly, or -1.
std::int64_t exact_bracket_index(const Series& lambda) {
  if (!lambda.is_exact()) return -1;
  if (lambda.is_zero()) return 0;
  if (lambda.terms().size() != 2 || lambda.ramification() != 1) return -1;
  const std::int64_t top = lambda.terms().back().exp;
  const std::int64_t q = lambda.desc().q();
  std::int64_t j = 0, pw = 1;
  while (pw < top) {
    if (pw > top / q) return -1;
    pw *= q;
    ++j;
  }
  if (pw != top) return -1;
  return lambda == bracket(lambda.field(), j) ? j : -1;
}

ValuationLaw model_law(const Series& lambda, const Series& c0) {
  if (c0.is_zero() && c0.is_exact()) return ValuationLaw::terminating(0);
  if (c0.is_zero()) return {};
  const Rational v0 = c0.valuation();
  if (const std::int64_t j = exact_bracket_index(lambda); j >= 0) return ValuationLaw::terminating(j + 1);

  const Series x = Series::x(lambda.field());
  const Series shifted = lambda + x;
  if (shifted.is_zero() && shifted.is_exact()) return ValuationLaw::carlitz_exponential(0, v0, 1);
  if (lambda.is_zero()) return {};
  if (lambda.valuation() <= Rational(0)) return ValuationLaw::bounded_below(0, v0);
  if (shifted.is_zero()) return {};

  const Rational nu = shifted.valuation();
  const std::int64_t q = lambda.desc().q();
  std::int64_t j0 = 0;
  Rational offset = v0;
  for (std::int64_t pw = 1; Rational(pw) <= nu; pw = checked_mul(pw, q), ++j0) {
    const Series factor = lambda - bracket(lambda.field(), j0);
    if (factor.is_zero()) return {};
    offset += factor.valuation();
  }
  return ValuationLaw::geometric(j0, offset, nu);
}

void require_square(const SeriesMatrix& m, const char* what) {
  if (!m.is_square()) throw std::invalid_argument(std::string(what) + " must be square");
}

}  // namespace

CarlitzCoeffs model_scalar(const Series& lambda, const Series& c0, int N) {
  if (N < 0) throw std::invalid_argument("coefficient count N must be nonnegative");
  require_same_field(lambda.desc(), c0.desc());
  CarlitzCoeffs out{lambda.field(), {c0}, model_law(lambda, c0)};
  for (int n = 1; n <= N; ++n) {
    const Series& prev = out.coeffs.back();
    out.coeffs.push_back(prev * (lambda - bracket(lambda.field(), n - 1, bracket_cap(prev))));
  }
  return out;
}

CarlitzMatrixCoeffs model_matrix(const SeriesMatrix& Lambda, const SeriesMatrix& C0, int N) {
  if (N < 0) throw std::invalid_argument("coefficient count N must be nonnegative");
  require_square(Lambda, "Lambda");
  const FieldPtr& field = Lambda.field();
  const std::size_t m = Lambda.rows();
  ValuationLaw law;
  if (Lambda.is_zero() && Lambda.precision().is_infinite()) {
    law = ValuationLaw::terminating(1);
  } else if (!Lambda.is_zero() && Lambda.valuation() > Rational(0)) {
    law = ValuationLaw::decay_at_least(0, C0.valuation(), min(Lambda.valuation(), Rational(1)));
  }
  CarlitzMatrixCoeffs out{field, {C0}, law};
  for (int n = 1; n <= N; ++n) {
    const SeriesMatrix factor = Lambda - SeriesMatrix::scalar(bracket(field, n - 1, bracket_cap(out.coeffs.back())), m);
    out.coeffs.push_back(factor * out.coeffs.back());
  }
  return out;
}

namespace {

SeriesMatrix w_rhs(const WSolution& sol, int k) {
  const std::size_t m = sol.pi[0].rows();
  SeriesMatrix c(sol.pi[0].field(), m, m);
  for (int j = 1; j <= k && j < static_cast<int>(sol.pi.size()); ++j)
    c += sol.pi[static_cast<std::size_t>(j)] * sol.w[static_cast<std::size_t>(k - j)].frobenius(j);
  return c;
}

SeriesMatrix w_B(const WSolution& sol, int k) {
  const std::size_t m = sol.pi[0].rows();
  return SeriesMatrix::scalar(bracket(sol.pi[0].field(), k), m) + sol.pi[0].frobenius(k);
}

}  // namespace

namespace {

WSolution solve_w(const std::vector<SeriesMatrix>& pi_in, int K, int Ng, const Rational& work) {
  std::vector<SeriesMatrix> pi;
  for (const auto& p : pi_in) pi.push_back(p.truncated(work));
  const std::size_t m = pi[0].rows();
  const FieldPtr field = pi[0].field();

  WSolution sol{pi, {SeriesMatrix::identity(field, m)}, model_matrix(pi[0], SeriesMatrix::identity(field, m), Ng)};
  const std::size_t mm = m * m;
  for (int k = 1; k <= K; ++k) {
    const SeriesMatrix B = w_B(sol, k);
    const SeriesMatrix C = w_rhs(sol, k);
    // Row (i,l) of X B - pi_0 X = C; unknown X_ab sits at column a*m + b.
    SeriesMatrix A(field, mm, mm);
    SeriesMatrix rhs(field, mm, 1);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t l = 0; l < m; ++l) {
        const std::size_t row = i * m + l;
        for (std::size_t j = 0; j < m; ++j) {
          A(row, i * m + j) += B(j, l);
          A(row, j * m + l) -= sol.pi[0](i, j);
        }
        rhs(row, 0) = C(i, l);
      }
    }
    SeriesMatrix flat(field, mm, 1);
    try {
      flat = mat_solve(A, rhs);
    } catch (const SingularError&) {
      throw SingularError("spectral non-resonance condition fails at k = " + std::to_string(k) +
                          ": lambda_i - lambda_j^(q^k) = [k] for eigenvalues of pi_0, or the precision is too low");
    }
    SeriesMatrix wk(field, m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) wk(a, b) = flat(a * m + b, 0);
    sol.w.push_back(std::move(wk));
  }
  return sol;
}

Rational min_w_precision(const WSolution& sol) {
  Rational p = Rational::infinity();
  for (const auto& w : sol.w) p = min(p, w.precision());
  return p;
}

}  // namespace

WSolution regular_system_W(std::vector<SeriesMatrix> pi, int K, int Ng, const Rational& prec) {
  if (pi.empty()) throw std::invalid_argument("the system needs at least pi_0");
  if (K < 0) throw std::invalid_argument("truncation order K must be nonnegative");
  const std::size_t m = pi[0].rows();
  for (const auto& p : pi)
    if (!p.is_square() || p.rows() != m) throw std::invalid_argument("every pi_k must be m x m");
  const SeriesMatrix pi0 = pi[0].truncated(prec);
  if (!pi0.is_zero() && pi0.valuation() <= Rational(0))
    throw DomainError("regular system requires |pi_0| < 1, but val(pi_0) = " + pi0.valuation().str());

  // Solving for w_k loses precision as the w_k grow; raise the working
  // precision until every w_k is known to prec, or until that stops helping.
  Rational work = prec;
  WSolution sol = solve_w(pi, K, Ng, work);
  for (int attempt = 0; attempt < 8 && prec.is_finite(); ++attempt) {
    const Rational got = min_w_precision(sol);
    if (got >= prec) break;
    const Rational next = work + (prec - got);
    WSolution retry = solve_w(pi, K, Ng, next);
    if (min_w_precision(retry) <= got) break;
    work = next;
    sol = std::move(retry);
  }
  return sol;
}

SeriesMatrix w_equation_residual(const WSolution& sol, int k) {
  if (k < 1 || k >= static_cast<int>(sol.w.size())) throw std::out_of_range("w_k index out of range");
  const SeriesMatrix& wk = sol.w[static_cast<std::size_t>(k)];
  return wk * w_B(sol, k) - sol.pi[0] * wk - w_rhs(sol, k);
}

SeriesMatrix eval_regular_solution(const WSolution& sol, const Series& t, const Rational& prec, int K) {
  const int top = K < 0 ? static_cast<int>(sol.w.size()) - 1 : std::min(K, static_cast<int>(sol.w.size()) - 1);
  const SeriesMatrix g = carlitz_eval(sol.g, t, prec);
  SeriesMatrix acc = sol.w[0] * g;
  for (int k = 1; k <= top; ++k) acc += sol.w[static_cast<std::size_t>(k)] * g.frobenius(k);
  return acc;
}

SeriesMatrix euler_companion(const std::vector<Series>& b) {
  if (b.empty()) throw std::invalid_argument("Euler equation order must be at least 1");
  const FieldPtr& field = b[0].field();
  const std::size_t m = b.size();
  SeriesMatrix B(field, m, m);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    B(i, i) = bracket(field, static_cast<std::int64_t>(i));
    B(i, i + 1) = Series::from_int(field, 1);
  }
  for (std::size_t j = 0; j < m; ++j) B(m - 1, j) = -b[j];
  B(m - 1, m - 1) += bracket(field, static_cast<std::int64_t>(m - 1));
  return B;
}

EulerM2 euler_m2(const Series& b0, const Series& b1, int N, const Rational& prec) {
  require_same_field(b0.desc(), b1.desc());
  const FieldPtr& field = b0.field();
  const FieldDesc& d = *field;
  if (d.p() == 2) throw DomainError("splitting the characteristic polynomial needs odd characteristic");
  const Series s = b1 - bracket(field, 1);
  const Series delta = s * s - b0.scaled(d.from_int(4));
  const FieldElem inv2 = d.inv(d.from_int(2));

  EulerM2 out{Series::zero(field), Series::zero(field), false, {}, {}};
  if (delta.is_zero()) {
    out.repeated = true;
    out.lambda1 = (-s).scaled(inv2);
    out.lambda2 = out.lambda1;
  } else {
    const Series root = sqrt(delta, prec);
    out.lambda1 = (root - s).scaled(inv2);
    out.lambda2 = (-root - s).scaled(inv2);
  }
  for (const Series* l : {&out.lambda1, &out.lambda2}) {
    if (!l->is_zero() && l->valuation() <= Rational(0))
      throw DomainError("eigenvalue with |lambda| >= 1 (val " + l->valuation().str() +
                        "); continuous solutions need both eigenvalues in the open unit disk");
  }
  out.psi1 = model_scalar(out.lambda1, Series::from_int(field, 1), N);
  if (!out.repeated) {
    out.psi2 = model_scalar(out.lambda2, Series::from_int(field, 1), N);
    return out;
  }

  // S_(n+1) = S_n (lambda - [n]) + P_n with P_n = prod_(j<n) (lambda - [j]).
  const Series& lambda = out.lambda1;
  CarlitzCoeffs psi2{field, {Series::zero(field)}, {}};
  Series S = Series::zero(field);
  for (int n = 0; n < N; ++n) {
    const Rational cap = lambda.precision().is_finite() ? lambda.precision() : bracket_cap(S);
    const Series factor = lambda - bracket(field, n, cap);
    S = S * factor + out.psi1[static_cast<std::size_t>(n)];
    psi2.coeffs.push_back(S);
  }
  const Rational rate = lambda.is_zero() ? Rational(1) : min(lambda.valuation(), Rational(1));
  psi2.law = ValuationLaw::decay_at_least(1, 0, rate);
  out.psi2 = std::move(psi2);
  return out;
}

EulerGeneral euler_general(const SeriesMatrix& B0, const SeriesMatrix& Nnil, const SeriesMatrix& X,
                           const SeriesMatrix& c0, int N) {
  require_square(B0, "B0");
  const std::size_t m = B0.rows();
  if (Nnil.rows() != m || !Nnil.is_square() || X.rows() != m || !X.is_square() || c0.rows() != m)
    throw std::invalid_argument("B0, N, X and c0 must share the dimension m");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && !B0(i, j).is_zero()) throw DomainError("B0 must be diagonal");
  if (!B0.is_zero() && B0.valuation() <= Rational(0))
    throw DomainError("Jordan split needs |B0| < 1, but val(B0) = " + B0.valuation().str());
  if (!(B0 * Nnil - Nnil * B0).is_zero()) throw DomainError("N must commute with B0");

  int kappa = 1;
  SeriesMatrix power = Nnil;
  while (!power.is_zero()) {
    if (kappa >= static_cast<int>(m)) throw DomainError("N is not nilpotent: N^m is nonzero");
    power = power * Nnil;
    ++kappa;
  }
  const SeriesMatrix Xinv = inverse(X);

  EulerGeneral out{Xinv * (B0 + Nnil) * X, model_matrix(B0 + Nnil, c0, N), {}};
  const Rational m1 = B0.is_zero() ? Rational(1) : min(B0.valuation(), Rational(1));
  Rational psi_offset = c0.valuation();
  if (!Nnil.is_zero()) psi_offset += Rational(kappa - 1) * min(Rational(0), Nnil.valuation() - m1);
  out.psi.law = ValuationLaw::decay_at_least(0, psi_offset, m1);
  out.phi = CarlitzMatrixCoeffs{B0.field(), {},
                                ValuationLaw::decay_at_least(0, psi_offset + Xinv.valuation() + X.valuation(), m1)};
  for (const auto& c : out.psi.coeffs) out.phi.coeffs.push_back(Xinv * c * X);
  return out;
}

Series hypergeom_step_rhs(std::int64_t a, std::int64_t b, int i, const Series& ci, const Series& ci1) {
  const FieldPtr& field = ci.field();
  const Series ba = bracket(field, -a);
  const Series bb = bracket(field, -b);
  const Series bi = bracket(field, i);
  const Series bi1 = bracket(field, i + 1);
  return ci1 * (bi + bi1 - ba - bb) + ci * ((bi - ba) * (bi - bb)) - ci1.frobenius(-1) * bi1.frobenius(-1);
}

HypergeomRun hypergeom_coeffs(std::int64_t a, std::int64_t b, const Series& c0, const Series& c1, int N,
                              const HypergeomOptions& options) {
  if (N < 1) throw std::invalid_argument("hypergeometric run needs N >= 1");
  require_same_field(c0.desc(), c1.desc());
  const FieldPtr& field = c0.field();
  const FieldDesc& d = *field;
  const Rational work = Rational(d.q()) * (options.prec + Rational(8));
  HypergeomRun run{a, b, CarlitzCoeffs{field, {c0.truncated(work), c1.truncated(work)}, {}}, {}, work};

  std::mt19937_64 rng(options.seed);
  const auto& base = d.base_field();
  for (int i = 0; i + 2 <= N; ++i) {
    const Series v = hypergeom_step_rhs(a, b, i, run.coeffs[static_cast<std::size_t>(i)],
                                        run.coeffs[static_cast<std::size_t>(i + 1)]);
    if (v.valuation() <= Rational(0))
      throw DomainError("Artin-Schreier step for c_" + std::to_string(i + 2) +
                        " has |v| >= 1; this needs |c_i| <= 1 and |c_(i+1)| <= 1");
    FieldElem theta{};
    switch (options.policy) {
      case BranchPolicy::principal:
        break;
      case BranchPolicy::generic:
        if (i >= options.generic_from && base.size() > 1) theta = base[1 + rng() % (base.size() - 1)];
        break;
      case BranchPolicy::scripted:
        if (static_cast<std::size_t>(i) >= options.script.size())
          throw std::invalid_argument("branch script has no entry for step " + std::to_string(i));
        theta = options.script[static_cast<std::size_t>(i)];
        if (!d.in_base_field(theta)) throw DomainError("scripted branch theta must lie in F_q");
        break;
    }
    run.branch_log.push_back(theta);
    run.coeffs.coeffs.push_back(artin_schreier_small_root(v, work) + Series::constant(field, theta));
  }

  const bool zero_data = c0.is_zero() && c1.is_zero();
  if (options.policy == BranchPolicy::principal && zero_data && c0.is_exact() && c1.is_exact()) {
    run.coeffs.law = ValuationLaw::terminating(0);
  } else if (options.policy == BranchPolicy::generic && d.q() > 1) {
    run.coeffs.law = ValuationLaw::bounded_below(2 + std::max(0, options.generic_from), 0);
  }
  return run;
}

const char* policy_name(BranchPolicy p) {
  switch (p) {
    case BranchPolicy::principal:
      return "principal";
    case BranchPolicy::generic:
      return "generic";
    case BranchPolicy::scripted:
      return "scripted";
  }
  return "principal";
}

BranchPolicy parse_policy(const std::string& name) {
  if (name == "principal") return BranchPolicy::principal;
  if (name == "generic") return BranchPolicy::generic;
  if (name == "scripted") return BranchPolicy::scripted;
  throw std::invalid_argument("unknown branch policy '" + name + "' (principal, generic, scripted)");
}

}  // namespace fql
