#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fql/expansion.hpp"
#include "fql/matrix.hpp"
#include "fql/series.hpp"

namespace fql {

/// Carlitz coefficients of tau d u = lambda u:
/// c_n = c_0 prod_(j<n) (lambda - [j]), n = 0..N.
///
/// The attached valuation law is exact when lambda is a bracket [j]
/// (terminating), lambda = -x (Carlitz exponential decay), |lambda| >= 1
/// (bounded below), or 0 < val(lambda + x) is finite (geometric decay once
/// q^n exceeds val(lambda + x)).
CarlitzCoeffs model_scalar(const Series& lambda, const Series& c0, int N);

/// Matrix version: c_i = (Lambda - [i-1] I) c_(i-1). With C0 = I this is the
/// solution g of tau d g = Lambda g.
CarlitzMatrixCoeffs model_matrix(const SeriesMatrix& Lambda, const SeriesMatrix& C0, int N);

/// Formal solution of tau d u = P(tau) u, P(tau) = sum_k pi_k tau^k, in the
/// form u(t) = sum_k w_k g(t)^(q^k), with g the model solution for pi_0.
struct WSolution {
  std::vector<SeriesMatrix> pi;
  std::vector<SeriesMatrix> w;  // w[0] = I
  CarlitzMatrixCoeffs g;
};

/// Solves w_k ([k] I + pi_0^(q^k)) - pi_0 w_k = sum_(j=1..k) pi_j w_(k-j)^(q^j)
/// for k = 1..K as one linear system of size m^2 per k; g gets Ng + 1
/// coefficients. Exact inputs are truncated to a working precision that is
/// raised until every w_k is known to at least `prec`; inputs carrying less
/// precision than that limit what can be certified.
///
/// Throws DomainError unless |pi_0| < 1, SingularError when the
/// non-resonance condition on the spectrum of pi_0 fails at some k.
WSolution regular_system_W(std::vector<SeriesMatrix> pi, int K, int Ng, const Rational& prec);

/// w_k B_k - pi_0 w_k - C_k, zero when w_k solves its equation.
SeriesMatrix w_equation_residual(const WSolution& sol, int k);

/// u(t) = sum_(k<=K) w_k g(t)^(q^k); K < 0 uses every w_k.
SeriesMatrix eval_regular_solution(const WSolution& sol, const Series& t, const Rational& prec, int K = -1);

/// Companion-type matrix of tau^m d^m u + b_(m-1) tau^(m-1) d^(m-1) u + ... + b_0 u = 0
/// in the variables phi_k = tau^(k-1) d^(k-1) u.
SeriesMatrix euler_companion(const std::vector<Series>& b);

struct EulerM2 {
  Series lambda1, lambda2;
  bool repeated = false;
  CarlitzCoeffs psi1, psi2;
};

/// Two independent solutions of tau^2 d^2 u + b1 tau d u + b0 u = 0 (odd p).
///
/// With delta = (b1 - [1])^2 - 4 b0 nonzero, lambda_(1,2) = ([1] - b1 +- sqrt(delta))/2
/// and psi_k has coefficients prod_(j<n) (lambda_k - [j]). When delta vanishes
/// to precision, psi_1 is the model solution for the double root and psi_2
/// has c_0 = 0, c_n = sum_j prod_(i<n, i!=j) (lambda - [i]). Exact inputs
/// use `prec` as working precision for the square root.
///
/// Throws DomainError when an eigenvalue has |lambda| >= 1 or p = 2.
EulerM2 euler_m2(const Series& b0, const Series& b1, int N, const Rational& prec);

struct EulerGeneral {
  SeriesMatrix B;              // X^(-1) (B0 + N) X
  CarlitzMatrixCoeffs psi;     // solves tau d Psi = (B0 + N) Psi
  CarlitzMatrixCoeffs phi;     // X^(-1) Psi X, solves tau d Phi = B Phi
};

/// Matrix solution from a caller-supplied Jordan split B = X^(-1)(B0 + N)X.
/// Checks that B0 is diagonal with |B0| < 1, N is nilpotent and commutes
/// with B0, and X is invertible.
EulerGeneral euler_general(const SeriesMatrix& B0, const SeriesMatrix& Nnil, const SeriesMatrix& X,
                           const SeriesMatrix& c0, int N);

enum class BranchPolicy { principal, generic, scripted };

struct HypergeomOptions {
  BranchPolicy policy = BranchPolicy::principal;
  std::uint64_t seed = 1;
  /// Steps before this index take the small root even under the generic policy.
  int generic_from = 0;
  /// theta per step for the scripted policy.
  std::vector<FieldElem> script;
  /// Target precision of the recursion residuals.
  Rational prec = 64;
};

struct HypergeomRun {
  std::int64_t a = 0, b = 0;
  CarlitzCoeffs coeffs;
  std::vector<FieldElem> branch_log;
  Rational working_prec;
};

/// Known part v of the step z^(1/q) - z = v for z = c_(i+2).
Series hypergeom_step_rhs(std::int64_t a, std::int64_t b, int i, const Series& ci, const Series& ci1);

/// Coefficients c_0..c_N of a solution of (Delta - [-a])(Delta - [-b]) u = d Delta u.
///
/// Each step solves z^(1/q) - z = v by the Artin-Schreier root z0 + theta
/// and records theta in branch_log. The inputs are truncated to a working
/// precision q (prec + 8), which keeps the residuals above prec.
/// Throws DomainError when some step has |v| >= 1.
HypergeomRun hypergeom_coeffs(std::int64_t a, std::int64_t b, const Series& c0, const Series& c1, int N,
                              const HypergeomOptions& options);

const char* policy_name(BranchPolicy p);
BranchPolicy parse_policy(const std::string& name);

}  // namespace fql
