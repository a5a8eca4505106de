#include <doctest.h>

#include "monolab/classical.hpp"
#include "monolab/errors.hpp"
#include "monolab/rational.hpp"

using namespace monolab;

TEST_CASE("rational text round trip") {
  CHECK(to_string(Rational(1, 2)) == "1/2");
  CHECK(to_string(Rational(-3)) == "-3");
  CHECK(to_string(Rational(4, 8)) == "1/2");
  CHECK(parse_rational("1/2") == Rational(1, 2));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(parse_rational(" 6/-4 ") == Rational(-3, 2));
  CHECK_THROWS_AS(parse_rational("x"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("1/2x"), Error);
}

TEST_CASE("matrix algebra is exact") {
  const auto m = RationalMatrix::unipotent(Rational(1, 2));
  CHECK(to_string(m) == "[[1,1/2],[0,1]]");
  CHECK(m.det() == Rational(1));
  CHECK(m.is_unipotent_upper());
  CHECK((m * m) == RationalMatrix::unipotent(Rational(1)));
  CHECK((m * m.inverse()).is_identity());
  CHECK(m.inverse() == RationalMatrix::unipotent(Rational(-1, 2)));

  RationalMatrix g;
  g(0, 0) = Rational(2);
  g(0, 1) = Rational(1);
  g(1, 0) = Rational(1);
  g(1, 1) = Rational(1);
  CHECK(g.det() == Rational(1));
  CHECK((g * g.inverse()).is_identity());
  CHECK_FALSE(g.is_unipotent_upper());
}

TEST_CASE("gluing product of the Chern pair") {
  CHECK(gluing_product(2, 1) == RationalMatrix::unipotent(Rational(1)));
  CHECK(gluing_product(3, 3).is_identity());
}

TEST_CASE("rounding gate") {
  CHECK(round_unipotent(0.996, 0.01) == RationalMatrix::unipotent(Rational(1)));
  CHECK(round_unipotent(-1.004, 0.01) == RationalMatrix::unipotent(Rational(-1)));
  CHECK_THROWS_AS(round_unipotent(0.95, 0.01), Error);
}
