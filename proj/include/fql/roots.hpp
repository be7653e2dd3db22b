#pragma once

#include <vector>

#include "fql/series.hpp"

namespace fql {

/// Square root in F_Q((x^(1/e))) for odd p.
///
/// The leading coefficient root is the canonical one of FieldDesc::sqrt; the
/// unit part is lifted by Newton iteration. An odd valuation doubles e. An
/// exact input whose root is not a finite sum needs a finite `cap`, which
/// then acts as its precision. When the truncated root squares back to an
/// exact input exactly, the result is returned exact.
///
/// Throws FieldExtensionError when the leading coefficient is a non-square
/// in F_Q, DomainError for p = 2, PrecisionError for zero input.
Series sqrt(const Series& s, const Rational& cap = Rational::infinity());

/// The small root z0 = sum_{k>=1} v^(q^k) of z^(1/q) - z = v.
///
/// Requires val(v) > 0 (throws DomainError otherwise). The root is known to
/// precision q * prec(v). An exact nonzero v uses `cap` as its precision.
Series artin_schreier_small_root(const Series& v, const Rational& cap = Rational::infinity());

/// All q roots z0 + theta, theta running over F_q in base_field() order, so
/// element 0 is the small root.
std::vector<Series> artin_schreier_roots(const Series& v, const Rational& cap = Rational::infinity());

}  // namespace fql
