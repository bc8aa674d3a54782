#include "swcert/rational.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace swcert {

namespace bmp = boost::multiprecision;

Rational::Rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  if (den < 0)
    v_ = bmp::cpp_rational(-num, -den);
  else
    v_ = bmp::cpp_rational(num, den);
}

Rational Rational::of(long long num, long long den) {
  return Rational(BigInt(num), BigInt(den));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("Rational: division by zero");
  return Rational(bmp::cpp_rational(a.v_ / b.v_));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::parse(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  std::string digits, frac;
  bool seen_dot = false, seen_slash = false;
  std::string den_digits;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot || seen_slash) throw std::invalid_argument("Rational::parse: bad literal " + text);
      seen_dot = true;
    } else if (c == '/') {
      if (seen_slash || seen_dot) throw std::invalid_argument("Rational::parse: bad literal " + text);
      seen_slash = true;
    } else if (c >= '0' && c <= '9') {
      if (seen_slash)
        den_digits.push_back(c);
      else if (seen_dot)
        frac.push_back(c);
      else
        digits.push_back(c);
    } else {
      throw std::invalid_argument("Rational::parse: bad character in " + text);
    }
  }
  if (digits.empty() && frac.empty()) throw std::invalid_argument("Rational::parse: no digits in " + text);
  BigInt num = digits.empty() ? BigInt(0) : BigInt(digits);
  BigInt den = 1;
  if (seen_slash) {
    if (den_digits.empty()) throw std::invalid_argument("Rational::parse: missing denominator in " + text);
    den = BigInt(den_digits);
    if (den == 0) throw std::invalid_argument("Rational::parse: zero denominator in " + text);
  } else if (seen_dot) {
    for (char c : frac) {
      num = num * 10 + (c - '0');
      den *= 10;
    }
  }
  if (neg) num = -num;
  return Rational(num, den);
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("Rational::from_double: non-finite input");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  // 53 doublings make the mantissa integral.
  long long m = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  BigInt num(m), den(1);
  if (exp > 0)
    num <<= exp;
  else
    den <<= -exp;
  return Rational(num, den);
}

double Rational::to_double() const {
  return v_.convert_to<double>();
}

std::string Rational::str() const {
  if (is_integer()) return num().str();
  return num().str() + "/" + den().str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.str();
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

Rational pow(const Rational& r, unsigned e) {
  Rational acc(1), base = r;
  while (e) {
    if (e & 1u) acc *= base;
    base *= base;
    e >>= 1u;
  }
  return acc;
}

BigInt floor_int(const Rational& r) {
  BigInt q = r.num() / r.den();
  if (r.num() < 0 && q * r.den() != r.num()) --q;
  return q;
}

namespace {

// Continued-fraction best approximation with bounded denominator.
Rational cf_bounded(Rational x, const BigInt& denom_bound) {
  if (denom_bound < 1) throw std::invalid_argument("rationalize: denominator bound must be >= 1");
  const bool neg = x.sign() < 0;
  if (neg) x = -x;
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // convergents p/q
  Rational rem = x;
  Rational best;
  while (true) {
    BigInt a = floor_int(rem);
    BigInt p2 = a * p1 + p0;
    BigInt q2 = a * q1 + q0;
    if (q2 > denom_bound) {
      // Largest semiconvergent with denominator within bound.
      BigInt k = (denom_bound - q0) / q1;
      BigInt ps = k * p1 + p0, qs = k * q1 + q0;
      Rational cand_s = qs > 0 ? Rational(ps, qs) : Rational(p1, q1);
      Rational cand_c(p1, q1 == 0 ? BigInt(1) : q1);
      best = (abs(x - cand_s) < abs(x - cand_c)) ? cand_s : cand_c;
      break;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Rational frac = rem - Rational(a);
    if (frac.is_zero()) {
      best = Rational(p1, q1);
      break;
    }
    rem = Rational(1) / frac;
  }
  return neg ? -best : best;
}

}  // namespace

Rational rationalize(const Rational& x, const BigInt& denom_bound) {
  if (x.den() <= denom_bound) return x;
  return cf_bounded(x, denom_bound);
}

Rational rationalize_double(double x, const BigInt& denom_bound) {
  return rationalize(Rational::from_double(x), denom_bound);
}

std::size_t hash_value(const Rational& r) {
  std::size_t h = 1469598103934665603ull;
  for (char c : r.str()) {
    h ^= static_cast<std::size_t>(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace swcert
