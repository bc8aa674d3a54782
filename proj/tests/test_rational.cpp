#include "doctest.h"
#include "swcert/rational.hpp"

using namespace swcert;

TEST_CASE("decimal literals parse to exact rationals") {
  CHECK(Rational::parse("-4.6") == Rational::of(-23, 5));
  CHECK(Rational::parse("1.65") == Rational::of(33, 20));
  CHECK(Rational::parse("0.012") == Rational::of(3, 250));
  CHECK(Rational::parse("33/20") == Rational::of(33, 20));
  CHECK(Rational::parse("-1/17179869184") == Rational(BigInt(-1), BigInt(1) << 34));
  CHECK(Rational::parse("7") == Rational(7));
  CHECK_THROWS(Rational::parse("1.2.3"));
  CHECK_THROWS(Rational::parse("1/0"));
}

TEST_CASE("normalization invariants") {
  Rational r(BigInt(6), BigInt(-8));
  CHECK(r.num() == -3);
  CHECK(r.den() == 4);
  CHECK(Rational::of(0, 5) == Rational(0));
  CHECK_THROWS(Rational(BigInt(1), BigInt(0)));
}

TEST_CASE("arbitrary precision arithmetic") {
  // 2^200 + 1 over 3, squared, times 9: exact.
  Rational big((BigInt(1) << 200) + 1, BigInt(3));
  Rational sq = big * big * Rational(9);
  CHECK(sq.den() == 1);
  CHECK(sq.num() == ((BigInt(1) << 200) + 1) * ((BigInt(1) << 200) + 1));
}

TEST_CASE("from_double is exact for dyadics") {
  CHECK(Rational::from_double(0.5) == Rational::of(1, 2));
  CHECK(Rational::from_double(-0.75) == Rational::of(-3, 4));
  CHECK(Rational::from_double(3.0) == Rational(3));
  double tiny = std::ldexp(1.0, -34);
  CHECK(Rational::from_double(-tiny) == Rational(BigInt(-1), BigInt(1) << 34));
  CHECK_THROWS(Rational::from_double(std::numeric_limits<double>::infinity()));
}

TEST_CASE("continued-fraction rationalization") {
  CHECK(rationalize_double(0.5, BigInt(1000000)) == Rational::of(1, 2));
  CHECK(rationalize_double(0.3333333333, BigInt(1000000)) == Rational::of(1, 3));
  CHECK(rationalize(Rational::of(355, 113), BigInt(113)) == Rational::of(355, 113));
  // pi to 10 digits, denominator bound 120 -> 355/113.
  CHECK(rationalize_double(3.1415926535, BigInt(120)) == Rational::of(355, 113));
  CHECK(rationalize(Rational::of(-22, 7), BigInt(3)) == Rational::of(-3, 1));
}

TEST_CASE("floor") {
  CHECK(floor_int(Rational::of(7, 2)) == 3);
  CHECK(floor_int(Rational::of(-7, 2)) == -4);
  CHECK(floor_int(Rational(5)) == 5);
}
