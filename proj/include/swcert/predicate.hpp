#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swcert/poly.hpp"

namespace swcert {

enum class Cmp { Lt, Le, Eq, Ge, Gt };

const char* cmp_text(Cmp c);
bool cmp_holds(Cmp c, int sign_of_lhs);
bool cmp_is_strict(Cmp c);
Cmp cmp_closure(Cmp c);

/// Atomic constraint p cmp 0.
struct Atom {
  Poly poly;
  Cmp cmp = Cmp::Ge;

  std::string str() const;
  friend bool operator==(const Atom& a, const Atom& b) { return a.cmp == b.cmp && a.poly == b.poly; }
};

using Conjunct = std::vector<Atom>;

/// Quantifier-free predicate in disjunctive normal form. An empty disjunct
/// list is `false`; a disjunct with no atoms is `true`. The normal form is
/// canonicalized (sorted, deduplicated) so structural equality is meaningful.
struct Predicate {
  std::vector<Conjunct> disjuncts;

  static Predicate top();
  static Predicate bottom();
  static Predicate atom(Poly p, Cmp c);

  bool is_true() const;
  bool is_false() const { return disjuncts.empty(); }

  Predicate and_with(const Predicate& o) const;
  Predicate or_with(const Predicate& o) const;

  /// Syntactic closure: strict comparisons relaxed to non-strict.
  Predicate closure() const;

  /// Exact membership test of a rational point.
  bool holds_at(const std::map<std::string, Rational>& point) const;
  bool holds_at_double(const std::vector<std::string>& vars, const std::vector<double>& vals,
                       double tol = 0.0) const;

  void canonicalize();
  std::string str() const;
  friend bool operator==(const Predicate& a, const Predicate& b) { return a.disjuncts == b.disjuncts; }
};

/// True when the conjunct contains a constant atom that is identically false
/// or an identical-polynomial pair with empty intersection (e.g. p > 0 and
/// p <= 0). Purely syntactic; used for vacuity detection.
bool conjunct_unsatisfiable(const Conjunct& c);

/// Splits a conjunct into inequality constraints g >= 0 (strict flags
/// dropped) and equality constraints h = 0, combining complementary
/// non-strict pairs (p >= 0 and p <= 0) into equalities.
struct ConstraintSystem {
  std::vector<Poly> inequalities;  // each g interpreted as g >= 0
  std::vector<Poly> equalities;    // each h interpreted as h = 0
};
ConstraintSystem constraints_of(const Conjunct& c);

}  // namespace swcert
