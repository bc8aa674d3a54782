#include "swcert/exp_bound.hpp"

#include <stdexcept>

namespace swcert {

namespace {

// Enclosure of e^r for |r| <= 1/2 from `budget` Taylor terms (k = 0..budget-1).
ExpBound exp_core(const Rational& r, unsigned budget) {
  Rational sum(0), term(1);
  for (unsigned k = 0; k < budget; ++k) {
    sum += term;
    term = term * r / Rational(static_cast<long long>(k + 1));
  }
  // `term` is now the first omitted term r^budget / budget!.
  Rational lo, hi;
  if (r.sign() >= 0) {
    // Remainder R = sum_{k>=budget} r^k/k! <= term / (1 - r/(budget+1)) <= 2*term for r <= 1/2.
    lo = sum;
    hi = sum + term * Rational(2);
  } else {
    // Alternating with strictly decreasing magnitudes: S and S+term bracket.
    Rational other = sum + term;
    lo = sum < other ? sum : other;
    hi = sum < other ? other : sum;
  }
  if (lo.sign() < 0) lo = Rational(0);
  return {r, lo, hi};
}

}  // namespace

ExpBound exp_enclosure(const Rational& r, unsigned budget) {
  if (budget < 1) throw std::invalid_argument("exp_enclosure: budget must be >= 1");
  if (r.is_zero()) return {r, Rational(1), Rational(1)};
  // Range-reduce: e^r = (e^{r/2^s})^{2^s} with |r/2^s| <= 1/2.
  unsigned s = 0;
  Rational reduced = r;
  const Rational half = Rational::of(1, 2);
  while (abs(reduced) > half) {
    reduced = reduced / Rational(2);
    ++s;
    if (s > 64) throw std::invalid_argument("exp_enclosure: exponent magnitude too large");
  }
  ExpBound core = exp_core(reduced, budget);
  Rational lo = core.lower, hi = core.upper;
  for (unsigned i = 0; i < s; ++i) {
    lo = lo * lo;  // lo >= 0, so squaring keeps directed bounds
    hi = hi * hi;
  }
  return {r, lo, hi};
}

ScaledExpCoeff operator+(const ScaledExpCoeff& a, const ScaledExpCoeff& b) {
  if (a.factor.is_zero()) return b;
  if (b.factor.is_zero()) return a;
  if (a.exponent != b.exponent)
    throw std::domain_error("ScaledExpCoeff: sum of terms with unequal exponents is not supported");
  return {a.factor + b.factor, a.exponent};
}

}  // namespace swcert
