#pragma once

#include <cstdint>
#include <vector>

#include "fql/series.hpp"

namespace fql {

/// [j] = x^(q^j) - x. Negative j lives in the perfection, so
/// [-1] = x^(1/q) - x has ramification index q.
///
/// The result is exact unless a finite `cap` is at most q^j, in which case
/// it is -x + O(x^cap); this keeps huge indices representable.
Series bracket(const FieldPtr& field, std::int64_t j, const Rational& cap = Rational::infinity());

/// Carlitz factorial D_i = [i] D_(i-1)^q and the plain product L_i = [i] L_(i-1).
struct Factorials {
  Series D;
  Series L;
};
Factorials factorials(const FieldPtr& field, int i);

/// Exact brackets and factorials for indices 0..max_index, built once.
class CarlitzContext {
 public:
  CarlitzContext(FieldPtr field, int max_index);

  const FieldPtr& field() const { return field_; }
  int max_index() const { return static_cast<int>(brackets_.size()) - 1; }
  const Series& bracket(int j) const { return brackets_.at(static_cast<std::size_t>(j)); }
  const Series& D(int i) const { return D_.at(static_cast<std::size_t>(i)); }
  const Series& L(int i) const { return L_.at(static_cast<std::size_t>(i)); }

 private:
  FieldPtr field_;
  std::vector<Series> brackets_, D_, L_;
};

/// f_0(t), ..., f_n(t) by f_i = (f_(i-1)^q - f_(i-1)) / [i].
///
/// Points of F_q[x] are evaluated exactly. Any other point is first
/// truncated to prec + n + 10, so results carry at least `prec` when t does.
/// Throws DomainError for |t| > 1.
std::vector<Series> f_values(const Series& t, int n, const Rational& prec = Rational::infinity());

Series f_eval(int i, const Series& t, const Rational& prec = Rational::infinity());

enum class EMethod { recursion, product };

/// e_i(t) = D_i f_i(t). The product method multiplies the q^i factors
/// (t - w), deg w < i, directly and is limited to i <= 8.
Series e_eval(int i, const Series& t, EMethod method, const Rational& prec = Rational::infinity());

/// f_i(x^n), exactly.
Series f_at_monomial(const FieldPtr& field, int i, int n);

}  // namespace fql
