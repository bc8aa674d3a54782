#pragma once

#include "swcert/rational.hpp"

namespace swcert {

/// Rational interval certified to contain e^r.
struct ExpBound {
  Rational exponent;
  Rational lower;
  Rational upper;

  Rational width() const { return upper - lower; }
};

/// Verified Taylor enclosure of e^r. `budget` is the number of series terms
/// (>= 1). The argument is range-reduced to |r'| <= 1/2 and the enclosure is
/// squared back up, so the interval stays exact and tight for moderate r.
/// For negative reduced arguments consecutive alternating partial sums
/// bracket the limit; for positive ones an explicit geometric remainder bound
/// is added.
ExpBound exp_enclosure(const Rational& r, unsigned budget);

/// factor * e^exponent, kept symbolic; exponent 0 degrades to a plain
/// rational. Sums require equal exponents.
struct ScaledExpCoeff {
  Rational factor;
  Rational exponent;

  bool is_rational() const { return exponent.is_zero() || factor.is_zero(); }

  friend ScaledExpCoeff operator*(const ScaledExpCoeff& a, const ScaledExpCoeff& b) {
    return {a.factor * b.factor, a.factor.is_zero() || b.factor.is_zero() ? Rational(0) : a.exponent + b.exponent};
  }
  friend ScaledExpCoeff operator+(const ScaledExpCoeff& a, const ScaledExpCoeff& b);
  friend bool operator==(const ScaledExpCoeff& a, const ScaledExpCoeff& b) {
    return a.factor == b.factor && (a.exponent == b.exponent || a.factor.is_zero());
  }
};

}  // namespace swcert
