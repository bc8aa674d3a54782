#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swcert/rational.hpp"

namespace swcert {

/// Exponent vector over an ordered variable list; graded-lex ordered.
struct Monomial {
  std::vector<unsigned> exps;

  unsigned degree() const;
  bool is_constant() const;
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps == b.exps; }
};

/// Graded lexicographic order by declared variable order.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Multivariate polynomial with exact rational coefficients over an ordered
/// variable list. No zero coefficients are stored; two polynomials over the
/// same variables are equal iff their term maps are equal.
class Poly {
public:
  using Terms = std::map<Monomial, Rational, GradedLex>;

  Poly() = default;
  explicit Poly(std::vector<std::string> vars) : vars_(std::move(vars)) {}
  Poly(std::vector<std::string> vars, Terms terms);

  static Poly constant(const Rational& c, std::vector<std::string> vars = {});
  static Poly var(const std::string& name, std::vector<std::string> vars);

  const std::vector<std::string>& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  unsigned degree() const;
  Rational constant_term() const;
  Rational coeff(const Monomial& m) const;
  Rational max_abs_coeff() const;
  std::size_t term_count() const { return terms_.size(); }

  void add_term(const Monomial& m, const Rational& c);

  /// Re-expresses this polynomial over a superset variable list.
  Poly aligned_to(const std::vector<std::string>& vars) const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator-() const;
  Poly scaled(const Rational& c) const;
  Poly pow(unsigned e) const;

  Poly derivative(const std::string& var) const;
  /// Terms of total degree exactly d.
  Poly homogeneous_part(unsigned d) const;

  friend bool operator==(const Poly& a, const Poly& b);

  std::string str() const;

private:
  std::vector<std::string> vars_;
  Terms terms_;

  std::optional<std::size_t> var_index(const std::string& name) const;
  friend Poly align_binary(const Poly& a, const Poly& b, Poly* b_out);
};

/// Merged variable list: a's order first, then b's extras in order.
std::vector<std::string> merge_vars(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Exact evaluation; throws std::invalid_argument naming any unbound variable.
Rational evaluate(const Poly& p, const std::map<std::string, Rational>& point);
double evaluate_double(const Poly& p, const std::vector<double>& point_by_var_index);

/// Simultaneous substitution, expanded and normalized. Variables without a
/// binding are left in place.
Poly substitute(const Poly& p, const std::map<std::string, Poly>& bindings);

/// Map from state variable name to its time derivative.
struct VectorField {
  std::map<std::string, Poly> rhs;

  bool defines(const std::string& var) const { return rhs.count(var) != 0; }
};

/// Gradient dot field: d/dt V along x' = f(x). Throws if V mentions a
/// variable the field does not define.
Poly lie_derivative(const Poly& V, const VectorField& field);

/// Exact division p / q when q divides p; nullopt otherwise.
std::optional<Poly> exact_divide(const Poly& p, const Poly& q);

/// Symmetric Gram matrix of a (not necessarily homogeneous) quadratic
/// polynomial over the given variables; nullopt if degree > 2 or p has
/// non-quadratic structure when `homogeneous_only`.
std::optional<RatMatrix> quadratic_form(const Poly& p, bool homogeneous_only = true);
Poly poly_from_quadratic_form(const RatMatrix& Q, const std::vector<std::string>& vars);

std::size_t hash_value(const Poly& p);

}  // namespace swcert
