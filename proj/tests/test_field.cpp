#include <doctest.h>

#include "fql/error.hpp"
#include "fql/field.hpp"
#include "fql/rational.hpp"
#include "support.hpp"

using namespace fql;

TEST_CASE("rational arithmetic and the infinity sentinel") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-3, -6) == Rational(1, 2));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(7, 2).floor() == 3);
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(-7, 2).ceil() == -3);
  const Rational inf = Rational::infinity();
  CHECK(inf > Rational(1000000));
  CHECK(inf + Rational(5) == inf);
  CHECK(inf - Rational(5) == inf);
  CHECK(min(inf, Rational(3)) == Rational(3));
  CHECK(Rational::parse("5/10") == Rational(1, 2));
  CHECK(Rational::parse("inf").is_infinite());
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK_THROWS(-inf);
  CHECK_THROWS(inf * Rational(0));
}

TEST_CASE("prime fields and extensions") {
  for (auto [p, v, f] : {std::tuple{2u, 1u, 1u}, {3u, 1u, 1u}, {2u, 2u, 1u}, {3u, 1u, 2u}, {5u, 1u, 1u}, {2u, 3u, 2u}}) {
    const FieldPtr F = FieldDesc::make(p, v, f);
    const std::uint32_t q = static_cast<std::uint32_t>(std::pow(p, v));
    CAPTURE(p);
    CAPTURE(v);
    CAPTURE(f);
    CHECK(F->q() == q);
    CHECK(F->order() == static_cast<std::uint32_t>(std::pow(q, f)));
    CHECK(F->base_field().size() == q);
    std::size_t in_base = 0;
    for (std::uint32_t c = 0; c < F->order(); ++c) in_base += F->in_base_field(FieldElem{c}) ? 1 : 0;
    CHECK(in_base == q);
    CHECK(F->from_int(p).is_zero());
  }
}

TEST_CASE("field axioms on random elements") {
  testing::Gen g(11);
  for (auto [p, v, f] : {std::tuple{2u, 2u, 1u}, {3u, 1u, 2u}, {7u, 1u, 1u}, {2u, 1u, 4u}}) {
    const FieldPtr F = FieldDesc::make(p, v, f);
    for (int trial = 0; trial < 200; ++trial) {
      const FieldElem a = g.elem(*F), b = g.elem(*F), c = g.elem(*F);
      CHECK(F->add(a, F->neg(a)).is_zero());
      CHECK(F->mul(a, F->add(b, c)) == F->add(F->mul(a, b), F->mul(a, c)));
      CHECK(F->mul(F->mul(a, b), c) == F->mul(a, F->mul(b, c)));
      if (!a.is_zero()) CHECK(F->mul(a, F->inv(a)) == F->one());
      // Frobenius is additive and inverted by negative powers.
      CHECK(F->frobenius(F->add(a, b), 1) == F->add(F->frobenius(a, 1), F->frobenius(b, 1)));
      CHECK(F->frobenius(F->frobenius(a, 2), -2) == a);
      CHECK(F->frobenius_p(F->mul(a, b)) == F->mul(F->frobenius_p(a), F->frobenius_p(b)));
    }
  }
}

TEST_CASE("square roots in finite fields") {
  const FieldPtr F = FieldDesc::make(3, 1, 2);
  for (std::uint32_t c = 1; c < F->order(); ++c) {
    const FieldElem a{c};
    const FieldElem sq = F->mul(a, a);
    const auto r = F->sqrt(sq);
    REQUIRE(r.has_value());
    CHECK(F->mul(*r, *r) == sq);
    CHECK(F->sqrt(sq) == r);  // deterministic choice
  }
  const FieldPtr F3 = FieldDesc::make(3);
  CHECK_FALSE(F3->sqrt(F3->from_int(2)).has_value());
  CHECK_THROWS_AS(FieldDesc::make(2, 2)->sqrt(FieldElem{1}), DomainError);
}

TEST_CASE("invalid field descriptors are refused") {
  CHECK_THROWS(FieldDesc::make(4));
  CHECK_THROWS(FieldDesc::make(2, 0));
  CHECK_THROWS(FieldDesc::make(2, 17));
  CHECK_THROWS(FieldDesc::make(2, 2, 1, {1, 0, 1}));  // x^2 + 1 = (x + 1)^2 over F_2
}
