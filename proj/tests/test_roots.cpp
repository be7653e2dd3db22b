#include <doctest.h>

#include <set>

#include "fql/error.hpp"
#include "fql/roots.hpp"
#include "support.hpp"

using namespace fql;

TEST_CASE("series square roots") {
  const FieldPtr F = FieldDesc::make(3);
  const Series x = Series::x(F);
  CHECK(fql::sqrt(x * x) == x);

  const Series s = Series::from_int(F, 1) + x;
  const Series r = fql::sqrt(s, Rational(30));
  CHECK(r.coeff_at(Rational(0)) == F->from_int(1));
  CHECK(r.coeff_at(Rational(1)) == F->from_int(2));
  CHECK((r * r - s).valuation() >= Rational(30));

  const Series rx = fql::sqrt(x);
  CHECK(rx.ramification() == 2);
  CHECK(rx.valuation() == Rational(1, 2));
  CHECK(rx * rx == x);

  CHECK_THROWS_AS(fql::sqrt(Series::from_int(F, 2)), FieldExtensionError);
  CHECK_THROWS_AS(fql::sqrt(Series::x(FieldDesc::make(2))), DomainError);

  testing::Gen g(9);
  const FieldPtr F9 = FieldDesc::make(3, 1, 2);
  for (int t = 0; t < 30; ++t) {
    const Series a = g.series(F9, g.range(-2, 3), Rational(25));
    const Series sq = a * a;
    const Series root = fql::sqrt(sq);
    CHECK((root * root - sq).valuation() >= sq.precision());
  }
}

TEST_CASE("Artin-Schreier roots") {
  const FieldPtr F2 = FieldDesc::make(2);
  const Series x = Series::x(F2);
  const Series z0 = artin_schreier_small_root(x, Rational(20));
  // x^2 + x^4 + ... + x^32, known to precision 2 * 20
  CHECK(z0.terms().size() == 5);
  CHECK(z0.precision() == Rational(40));
  CHECK(z0.valuation() == Rational(2));
  CHECK((z0.frobenius(-1) - z0 - x).is_zero());

  const FieldPtr F3 = FieldDesc::make(3);
  const auto zero_roots = artin_schreier_roots(Series::zero(F3));
  REQUIRE(zero_roots.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(zero_roots[k] == Series::constant(F3, F3->base_field()[k]));

  CHECK_THROWS_AS(artin_schreier_small_root(Series::from_int(F3, 1)), DomainError);
}

TEST_CASE("Artin-Schreier roots on random inputs") {
  testing::Gen g(17);
  for (auto [p, v, f] : {std::tuple{2u, 1u, 1u}, {3u, 1u, 1u}, {2u, 2u, 1u}, {3u, 1u, 2u}}) {
    const FieldPtr F = FieldDesc::make(p, v, f);
    for (int t = 0; t < 10; ++t) {
      const Series vv = g.series(F, g.range(1, 3), Rational(g.range(15, 30)));
      const auto roots = artin_schreier_roots(vv);
      REQUIRE(roots.size() == F->q());
      CHECK(roots[0].valuation() == Rational(F->q()) * vv.valuation());
      for (std::size_t k = 0; k < roots.size(); ++k) {
        const Series res = roots[k].frobenius(-1) - roots[k] - vv;
        CHECK(res.valuation() >= vv.precision());
        if (k > 0) CHECK(roots[k].valuation() == Rational(0));
        for (std::size_t l = 0; l < k; ++l) CHECK_FALSE((roots[k] - roots[l]).is_zero());
      }
    }
  }
}
