#include <boost/multiprecision/cpp_dec_float.hpp>

#include "doctest.h"
#include "swcert/exp_bound.hpp"

using namespace swcert;

namespace {

using Dec100 = boost::multiprecision::cpp_dec_float_100;

// High-precision reference (100 digits), computed through a different code
// path (boost floating-point exp), used purely as a test oracle.
Dec100 exp_oracle(const Rational& r) {
  Dec100 x = Dec100(r.num().str()) / Dec100(r.den().str());
  return exp(x);
}

bool encloses(const ExpBound& b, const Dec100& truth) {
  Dec100 lo = Dec100(b.lower.num().str()) / Dec100(b.lower.den().str());
  Dec100 hi = Dec100(b.upper.num().str()) / Dec100(b.upper.den().str());
  return lo <= truth && truth <= hi;
}

}  // namespace

TEST_CASE("e^0 is exactly [1,1]") {
  ExpBound b = exp_enclosure(Rational(0), 5);
  CHECK(b.lower == Rational(1));
  CHECK(b.upper == Rational(1));
}

TEST_CASE("e^1 at 30 terms is tighter than 1e-12 and contains e") {
  ExpBound b = exp_enclosure(Rational(1), 30);
  CHECK(b.width() < Rational(BigInt(1), BigInt(1000000000000LL)));
  CHECK(encloses(b, exp_oracle(Rational(1))));
  CHECK(b.lower.to_double() == doctest::Approx(2.718281828459045).epsilon(1e-12));
}

TEST_CASE("e^(-6/5) enclosure") {
  ExpBound b = exp_enclosure(Rational::of(-6, 5), 30);
  CHECK(encloses(b, exp_oracle(Rational::of(-6, 5))));
  CHECK(b.upper < Rational(1));
  CHECK(b.lower.to_double() == doctest::Approx(0.3011942119122021).epsilon(1e-10));
  CHECK(b.width() < Rational(BigInt(1), BigInt(1000000000000LL)));
}

TEST_CASE("soundness on the grid r in {-5..5} step 1/4 against the 50-digit oracle") {
  for (int k = -20; k <= 20; ++k) {
    Rational r = Rational(k) / Rational(4);
    ExpBound b = exp_enclosure(r, 30);
    CHECK(encloses(b, exp_oracle(r)));
    CHECK(b.lower <= b.upper);
  }
}

TEST_CASE("width shrinks as the budget grows") {
  Rational r = Rational::of(-6, 5);
  Rational prev_width(-1);
  for (unsigned budget : {4u, 8u, 16u, 32u}) {
    ExpBound b = exp_enclosure(r, budget);
    if (prev_width.sign() >= 0) CHECK(b.width() <= prev_width);
    prev_width = b.width();
  }
}

TEST_CASE("lower bounds are monotone in the exponent at equal budget") {
  Rational prev_lo;
  bool first = true;
  for (int k = -20; k <= 20; ++k) {
    Rational r = Rational(k) / Rational(4);
    ExpBound b = exp_enclosure(r, 30);
    if (!first) CHECK(prev_lo <= b.lower);
    prev_lo = b.lower;
    first = false;
  }
}

TEST_CASE("scaled exp coefficients") {
  ScaledExpCoeff a{Rational(2), Rational::of(1, 2)};
  ScaledExpCoeff b{Rational(3), Rational::of(1, 2)};
  CHECK((a + b).factor == Rational(5));
  CHECK((a * b).exponent == Rational(1));
  ScaledExpCoeff plain{Rational(4), Rational(0)};
  CHECK(plain.is_rational());
  ScaledExpCoeff mixed{Rational(1), Rational(2)};
  CHECK_THROWS((void)(mixed + ScaledExpCoeff{Rational(1), Rational(3)}));
}
