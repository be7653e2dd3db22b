#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fql/expansion.hpp"
#include "fql/solvers.hpp"

namespace fql {

enum class Regularity { analytic, locally_analytic, continuous, strongly_singular, inconclusive };

/// How a verdict was reached: from a closed-form valuation law, from a
/// one-sided bound, or from the stored prefix alone.
enum class EvidenceMode { exact_formula, lower_bound, heuristic };

const char* regularity_name(Regularity r);
const char* mode_name(EvidenceMode m);

struct ValuationEntry {
  std::int64_t n;
  Rational valuation;  // for a coefficient that is zero to precision, that precision
  bool zero;
};

struct RegularityReport {
  Regularity cls = Regularity::inconclusive;
  EvidenceMode mode = EvidenceMode::heuristic;
  /// gamma = liminf q^(-n) val(c_n); infinity for terminating expansions.
  std::optional<Rational> gamma;
  /// Locally analytic on every ball of radius q^(-l).
  std::optional<std::int64_t> ball_exponent;
  /// |c_n| >= q^(-rho_val) for n >= i0.
  std::optional<Rational> rho_val;
  std::optional<std::int64_t> i0;
  std::vector<ValuationEntry> evidence;
  std::string note;
};

struct GammaEstimate {
  std::optional<Rational> gamma;
  EvidenceMode mode = EvidenceMode::heuristic;
  bool conclusive = false;
};

/// Smallest l >= 0 with analyticity on balls of radius q^(-l) when
/// gamma > 0: l = max(0, floor(-log_q((q-1) gamma)) + 1), computed exactly.
std::int64_t ball_exponent(const Rational& gamma, std::uint32_t q);

template <class C>
GammaEstimate gamma_estimate(const CarlitzExpansion<C>& c);

struct SingularityVerdict {
  enum class Answer { yes, no, inconclusive };
  Answer answer = Answer::inconclusive;
  EvidenceMode mode = EvidenceMode::heuristic;
  std::optional<Rational> rho_val;
  std::optional<std::int64_t> i0;
};

/// |c_i| >= rho > 0 for all i >= i0, from the law or from a non-decaying
/// observed tail.
template <class C>
SingularityVerdict strong_singularity_test(const CarlitzExpansion<C>& c);

template <class C>
RegularityReport classify(const CarlitzExpansion<C>& c);

/// Equation descriptors for residual checks.
struct ModelEq {
  Series lambda;
};
struct ModelMatrixEq {
  SeriesMatrix Lambda;
};
/// tau^m d^m u + b_(m-1) tau^(m-1) d^(m-1) u + ... + b_0 u = 0.
struct EulerEq {
  std::vector<Series> b;
};
/// tau d Phi = B Phi.
struct FirstOrderMatrixEq {
  SeriesMatrix B;
};
/// (Delta - [-a])(Delta - [-b]) u = d Delta u.
struct HypergeomEq {
  std::int64_t a, b;
};
using ScalarEquation = std::variant<ModelEq, EulerEq, HypergeomEq>;
using MatrixEquation = std::variant<ModelMatrixEq, FirstOrderMatrixEq>;

int equation_order(const ScalarEquation& eq);
int equation_order(const MatrixEquation& eq);
/// Exponent units of slack allowed below the target precision.
inline int residual_slack(int order) { return order + 5; }

struct ResidualEntry {
  /// Coefficient residuals: the highest coefficient index involved.
  /// Pointwise residuals: the position of the point in the input list
  /// (regular systems: the equation index k).
  std::int64_t index;
  Rational valuation;
  bool pass;
};

struct ResidualReport {
  bool pass = true;
  Rational threshold;
  std::vector<ResidualEntry> coefficientwise;
  std::vector<ResidualEntry> pointwise;
  std::optional<std::int64_t> first_failure;  // smallest failing coefficient index
};

/// Substitutes the expansion into the equation through the coefficient
/// operators, and at each point through pointwise operators. Passes when
/// every residual has valuation >= prec - slack(order).
ResidualReport residual_check(const ScalarEquation& eq, const CarlitzCoeffs& c, const std::vector<Series>& points,
                              const Rational& prec);
ResidualReport residual_check(const MatrixEquation& eq, const CarlitzMatrixCoeffs& c,
                              const std::vector<Series>& points, const Rational& prec);
/// Regular systems: the w_k equations coefficientwise, and
/// Delta u - P(tau) u at each point.
ResidualReport residual_check(const WSolution& sol, const std::vector<Series>& points, const Rational& prec);

/// Raw residual sequences through the coefficient operators, index j of the
/// result involving coefficients j..j+order.
std::vector<Series> coefficient_residuals(const ScalarEquation& eq, const CarlitzCoeffs& c);
std::vector<SeriesMatrix> coefficient_residuals(const MatrixEquation& eq, const CarlitzMatrixCoeffs& c);

/// Pointwise residual of the equation at t, evaluating the expansion at precision `prec`.
Series pointwise_residual(const ScalarEquation& eq, const CarlitzCoeffs& c, const Series& t, const Rational& prec);
SeriesMatrix pointwise_residual(const MatrixEquation& eq, const CarlitzMatrixCoeffs& c, const Series& t,
                                const Rational& prec);
SeriesMatrix pointwise_residual(const WSolution& sol, const Series& t, const Rational& prec, int K = -1);

}  // namespace fql
