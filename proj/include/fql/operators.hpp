#pragma once

#include <functional>
#include <vector>

#include "fql/expansion.hpp"
#include "fql/matrix.hpp"

namespace fql {

/// Delta on Carlitz coefficients: out_j = c_(j+1) + [j] c_j.
///
/// The top coefficient of a truncated expansion depends on the unknown
/// c_(N+1), so the result is one shorter unless the expansion terminates.
template <class C>
CarlitzExpansion<C> carlitz_delta(const CarlitzExpansion<C>& c);

/// d on Carlitz coefficients: out_j = c_(j+1)^(1/q). One shorter.
template <class C>
CarlitzExpansion<C> carlitz_d(const CarlitzExpansion<C>& c);

/// tau on Carlitz coefficients: out_j = c_j^q + [j] c_(j-1)^q, same length
/// (one longer for a terminating expansion).
template <class C>
CarlitzExpansion<C> carlitz_tau(const CarlitzExpansion<C>& c);

/// sum_(i<=N) c_i f_i(t).
///
/// At t in F_q[x] only f_i with i <= deg t are nonzero, and the sum is
/// finite. Elsewhere the partial sum is computed to `prec`; with tail_bound
/// the precision is further capped by the valuation law's bound on the
/// omitted coefficients. Expansions whose law makes them strongly singular
/// are refused away from F_q[x].
template <class C>
C carlitz_eval(const CarlitzExpansion<C>& c, const Series& t, const Rational& prec, bool tail_bound = true);

/// sum_k a_k t^(q^k).
struct LinearPowerSeries {
  FieldPtr field;
  std::vector<Series> coeffs;

  Series eval(const Series& t) const;
};

/// out_k = [k] a_k.
LinearPowerSeries linear_delta(const LinearPowerSeries& a);
/// out_k = ([k+1] a_(k+1))^(1/q).
LinearPowerSeries linear_d(const LinearPowerSeries& a);

/// P(tau) u = sum_k pi_k u^(q^k), Frobenius entrywise. u may be a column
/// vector or a square matrix.
SeriesMatrix apply_P(const std::vector<SeriesMatrix>& pi, const SeriesMatrix& u);

/// Pointwise operators on functions of t.
using PointFn = std::function<Series(const Series&)>;
using MatrixPointFn = std::function<SeriesMatrix(const Series&)>;

PointFn pointwise_delta(PointFn u);
PointFn pointwise_d(PointFn u);
PointFn pointwise_tau(PointFn u);
MatrixPointFn pointwise_delta(MatrixPointFn u);
MatrixPointFn pointwise_d(MatrixPointFn u);
MatrixPointFn pointwise_tau(MatrixPointFn u);

}  // namespace fql
