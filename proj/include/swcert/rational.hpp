#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace swcert {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. Always normalized: denominator > 0, lowest terms.
/// Thin value wrapper around boost cpp_rational with controlled conversions,
/// so it can be used as an Eigen scalar without tripping boost's converting
/// constructors.
class Rational {
public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}
  Rational(long long n) : v_(n) {}
  Rational(const BigInt& n) : v_(n) {}
  Rational(const BigInt& num, const BigInt& den);
  explicit Rational(const boost::multiprecision::cpp_rational& v) : v_(v) {}

  static Rational of(long long num, long long den);
  /// Parses "7", "-33/20" or a decimal literal like "-4.6" (stored exactly).
  static Rational parse(const std::string& text);
  /// Exact dyadic rational equal to the double (throws on NaN/Inf).
  static Rational from_double(double x);

  BigInt num() const { return boost::multiprecision::numerator(v_); }
  BigInt den() const { return boost::multiprecision::denominator(v_); }
  const boost::multiprecision::cpp_rational& raw() const { return v_; }

  bool is_zero() const { return v_.is_zero(); }
  bool is_integer() const { return den() == 1; }
  int sign() const { return v_ < 0 ? -1 : (v_ > 0 ? 1 : 0); }

  double to_double() const;
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v_ + b.v_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v_ - b.v_); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v_ * b.v_); }
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(boost::multiprecision::cpp_rational(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
  boost::multiprecision::cpp_rational v_;
};

Rational abs(const Rational& r);
Rational pow(const Rational& r, unsigned e);
/// Floor as a BigInt (round toward -infinity).
BigInt floor_int(const Rational& r);

/// Best rational approximation to x with denominator <= denom_bound,
/// by continued-fraction convergents (deterministic).
Rational rationalize_double(double x, const BigInt& denom_bound);
/// Same, but rounding an exact rational to a bounded-denominator one.
Rational rationalize(const Rational& x, const BigInt& denom_bound);

std::size_t hash_value(const Rational& r);

}  // namespace swcert

namespace Eigen {
template <>
struct NumTraits<swcert::Rational> {
  using Real = swcert::Rational;
  using NonInteger = swcert::Rational;
  using Literal = swcert::Rational;
  using Nested = swcert::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 60,
    MulCost = 60,
  };
  static inline swcert::Rational epsilon() { return swcert::Rational(0); }
  static inline swcert::Rational dummy_precision() { return swcert::Rational(0); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen

namespace swcert {
using RatMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RatVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
}  // namespace swcert
