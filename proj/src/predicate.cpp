#include "swcert/predicate.hpp"

#include <algorithm>

namespace swcert {

const char* cmp_text(Cmp c) {
  switch (c) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Eq: return "=";
    case Cmp::Ge: return ">=";
    case Cmp::Gt: return ">";
  }
  return "?";
}

bool cmp_holds(Cmp c, int s) {
  switch (c) {
    case Cmp::Lt: return s < 0;
    case Cmp::Le: return s <= 0;
    case Cmp::Eq: return s == 0;
    case Cmp::Ge: return s >= 0;
    case Cmp::Gt: return s > 0;
  }
  return false;
}

bool cmp_is_strict(Cmp c) { return c == Cmp::Lt || c == Cmp::Gt; }

Cmp cmp_closure(Cmp c) {
  if (c == Cmp::Lt) return Cmp::Le;
  if (c == Cmp::Gt) return Cmp::Ge;
  return c;
}

std::string Atom::str() const { return poly.str() + " " + cmp_text(cmp) + " 0"; }

Predicate Predicate::top() {
  Predicate p;
  p.disjuncts.push_back({});
  return p;
}

Predicate Predicate::bottom() { return Predicate{}; }

Predicate Predicate::atom(Poly p, Cmp c) {
  Predicate out;
  out.disjuncts.push_back({Atom{std::move(p), c}});
  return out;
}

bool Predicate::is_true() const {
  return std::any_of(disjuncts.begin(), disjuncts.end(), [](const Conjunct& c) { return c.empty(); });
}

Predicate Predicate::and_with(const Predicate& o) const {
  Predicate out;
  for (const auto& a : disjuncts) {
    for (const auto& b : o.disjuncts) {
      Conjunct c = a;
      c.insert(c.end(), b.begin(), b.end());
      out.disjuncts.push_back(std::move(c));
    }
  }
  out.canonicalize();
  return out;
}

Predicate Predicate::or_with(const Predicate& o) const {
  Predicate out = *this;
  out.disjuncts.insert(out.disjuncts.end(), o.disjuncts.begin(), o.disjuncts.end());
  out.canonicalize();
  return out;
}

Predicate Predicate::closure() const {
  Predicate out;
  for (const auto& d : disjuncts) {
    Conjunct c;
    for (const auto& a : d) c.push_back(Atom{a.poly, cmp_closure(a.cmp)});
    out.disjuncts.push_back(std::move(c));
  }
  out.canonicalize();
  return out;
}

bool Predicate::holds_at(const std::map<std::string, Rational>& point) const {
  for (const auto& d : disjuncts) {
    bool ok = true;
    for (const auto& a : d) {
      if (!cmp_holds(a.cmp, evaluate(a.poly, point).sign())) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool Predicate::holds_at_double(const std::vector<std::string>& vars, const std::vector<double>& vals,
                                double tol) const {
  for (const auto& d : disjuncts) {
    bool ok = true;
    for (const auto& a : d) {
      double v = evaluate_double(a.poly.aligned_to(merge_vars(a.poly.vars(), vars)).aligned_to(vars), vals);
      bool h = false;
      switch (a.cmp) {
        case Cmp::Lt: h = v < tol; break;
        case Cmp::Le: h = v <= tol; break;
        case Cmp::Eq: h = v >= -tol && v <= tol; break;
        case Cmp::Ge: h = v >= -tol; break;
        case Cmp::Gt: h = v > -tol; break;
      }
      if (!h) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

namespace {

bool atom_less(const Atom& a, const Atom& b) {
  const std::string sa = a.str(), sb = b.str();
  return sa < sb;
}

bool conjunct_less(const Conjunct& a, const Conjunct& b) {
  auto key = [](const Conjunct& c) {
    std::string s;
    for (const auto& x : c) s += x.str() + ";";
    return s;
  };
  return key(a) < key(b);
}

}  // namespace

void Predicate::canonicalize() {
  // Constant atoms evaluate immediately: true ones vanish, false ones kill
  // their conjunct.
  std::vector<Conjunct> kept;
  for (auto& d : disjuncts) {
    bool dead = false;
    Conjunct c;
    for (auto& a : d) {
      if (a.poly.is_constant()) {
        if (cmp_holds(a.cmp, a.poly.constant_term().sign())) continue;
        dead = true;
        break;
      }
      c.push_back(std::move(a));
    }
    if (!dead) kept.push_back(std::move(c));
  }
  disjuncts = std::move(kept);
  for (auto& d : disjuncts) {
    std::sort(d.begin(), d.end(), atom_less);
    d.erase(std::unique(d.begin(), d.end()), d.end());
  }
  std::sort(disjuncts.begin(), disjuncts.end(), conjunct_less);
  disjuncts.erase(std::unique(disjuncts.begin(), disjuncts.end()), disjuncts.end());
  // `true` absorbs everything else.
  if (is_true()) {
    disjuncts.clear();
    disjuncts.push_back({});
  }
}

std::string Predicate::str() const {
  if (is_false()) return "false";
  if (is_true()) return "true";
  std::string s;
  for (std::size_t i = 0; i < disjuncts.size(); ++i) {
    if (i) s += " | ";
    const auto& d = disjuncts[i];
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (j) s += " & ";
      s += d[j].str();
    }
  }
  return s;
}

bool conjunct_unsatisfiable(const Conjunct& c) {
  for (const auto& a : c) {
    if (a.poly.is_constant() && !cmp_holds(a.cmp, a.poly.constant_term().sign())) return true;
  }
  // Identical-polynomial contradictions (p > 0 & p <= 0, p = 0 & p > 0, ...).
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const Atom *x = &c[i], *y = &c[j];
      Poly diff = x->poly - y->poly;
      Poly sum = x->poly + y->poly;
      auto contradicts = [](Cmp a, Cmp b) {
        // For the same polynomial p: does (p a 0) & (p b 0) have empty intersection?
        auto lo_open = [](Cmp m) { return m == Cmp::Gt; };
        auto hi_open = [](Cmp m) { return m == Cmp::Lt; };
        bool a_up = a == Cmp::Gt || a == Cmp::Ge;
        bool b_up = b == Cmp::Gt || b == Cmp::Ge;
        bool a_dn = a == Cmp::Lt || a == Cmp::Le;
        bool b_dn = b == Cmp::Lt || b == Cmp::Le;
        if (a == Cmp::Eq) return b == Cmp::Gt || b == Cmp::Lt;
        if (b == Cmp::Eq) return a == Cmp::Gt || a == Cmp::Lt;
        if (a_up && b_dn) return lo_open(a) || hi_open(b);
        if (a_dn && b_up) return hi_open(a) || lo_open(b);
        return false;
      };
      if (diff.is_zero() && contradicts(x->cmp, y->cmp)) return true;
      if (sum.is_zero()) {
        // p and -p: mirror y's comparison.
        Cmp m = y->cmp;
        Cmp my = m == Cmp::Lt ? Cmp::Gt : m == Cmp::Le ? Cmp::Ge : m == Cmp::Ge ? Cmp::Le : m == Cmp::Gt ? Cmp::Lt : Cmp::Eq;
        if (contradicts(x->cmp, my)) return true;
      }
    }
  }
  return false;
}

ConstraintSystem constraints_of(const Conjunct& c) {
  ConstraintSystem out;
  std::vector<bool> used(c.size(), false);
  auto as_ge = [](const Atom& a) -> Poly {
    // Orientation so that the constraint reads g >= 0.
    switch (a.cmp) {
      case Cmp::Ge:
      case Cmp::Gt: return a.poly;
      case Cmp::Le:
      case Cmp::Lt: return -a.poly;
      case Cmp::Eq: return a.poly;
    }
    return a.poly;
  };
  // Complementary non-strict pairs become equalities.
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (used[i] || cmp_is_strict(c[i].cmp) || c[i].cmp == Cmp::Eq) continue;
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (used[j] || cmp_is_strict(c[j].cmp) || c[j].cmp == Cmp::Eq) continue;
      Poly gi = as_ge(c[i]);
      Poly gj = as_ge(c[j]);
      if ((gi + gj).is_zero()) {
        out.equalities.push_back(gi);
        used[i] = used[j] = true;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (used[i]) continue;
    if (c[i].cmp == Cmp::Eq)
      out.equalities.push_back(c[i].poly);
    else
      out.inequalities.push_back(as_ge(c[i]));
  }
  // Drop constant constraints that are trivially satisfied.
  auto trivially_true = [](const Poly& p, bool eq) {
    return p.is_constant() && (eq ? p.constant_term().is_zero() : p.constant_term().sign() >= 0);
  };
  std::erase_if(out.inequalities, [&](const Poly& p) { return trivially_true(p, false); });
  std::erase_if(out.equalities, [&](const Poly& p) { return trivially_true(p, true); });
  return out;
}

}  // namespace swcert
