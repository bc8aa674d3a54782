#include "swcert/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace swcert {

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (unsigned e : exps) d += e;
  return d;
}

bool Monomial::is_constant() const {
  return std::all_of(exps.begin(), exps.end(), [](unsigned e) { return e == 0; });
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  unsigned da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return std::lexicographical_compare(a.exps.begin(), a.exps.end(), b.exps.begin(), b.exps.end());
}

Poly::Poly(std::vector<std::string> vars, Terms terms) : vars_(std::move(vars)), terms_(std::move(terms)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second.is_zero())
      it = terms_.erase(it);
    else
      ++it;
  }
}

Poly Poly::constant(const Rational& c, std::vector<std::string> vars) {
  Poly p(std::move(vars));
  if (!c.is_zero()) p.terms_[Monomial{std::vector<unsigned>(p.vars_.size(), 0)}] = c;
  return p;
}

Poly Poly::var(const std::string& name, std::vector<std::string> vars) {
  Poly p(std::move(vars));
  auto idx = p.var_index(name);
  if (!idx) throw std::invalid_argument("Poly::var: undeclared variable " + name);
  Monomial m{std::vector<unsigned>(p.vars_.size(), 0)};
  m.exps[*idx] = 1;
  p.terms_[m] = Rational(1);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_constant());
}

unsigned Poly::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

Rational Poly::constant_term() const {
  Monomial m{std::vector<unsigned>(vars_.size(), 0)};
  return coeff(m);
}

Rational Poly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational Poly::max_abs_coeff() const {
  Rational best(0);
  for (const auto& [m, c] : terms_) {
    Rational a = abs(c);
    if (a > best) best = a;
  }
  return best;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
  if (m.exps.size() != vars_.size()) throw std::invalid_argument("Poly::add_term: exponent arity mismatch");
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (!c.is_zero()) terms_[m] = c;
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

std::optional<std::size_t> Poly::var_index(const std::string& name) const {
  auto it = std::find(vars_.begin(), vars_.end(), name);
  if (it == vars_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vars_.begin());
}

std::vector<std::string> merge_vars(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  for (const auto& v : b)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

Poly Poly::aligned_to(const std::vector<std::string>& vars) const {
  if (vars == vars_) return *this;
  // Dropping a variable is fine as long as it does not occur.
  constexpr std::size_t kDropped = static_cast<std::size_t>(-1);
  std::vector<std::size_t> where(vars_.size(), kDropped);
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = std::find(vars.begin(), vars.end(), vars_[i]);
    if (it != vars.end()) where[i] = static_cast<std::size_t>(it - vars.begin());
  }
  Poly out(vars);
  for (const auto& [m, c] : terms_) {
    Monomial nm{std::vector<unsigned>(vars.size(), 0)};
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (m.exps[i] == 0) continue;
      if (where[i] == kDropped)
        throw std::invalid_argument("Poly::aligned_to: target drops occurring variable " + vars_[i]);
      nm.exps[where[i]] = m.exps[i];
    }
    out.terms_[nm] = c;
  }
  return out;
}

Poly align_binary(const Poly& a, const Poly& b, Poly* b_out) {
  if (a.vars_ == b.vars_) {
    *b_out = b;
    return a;
  }
  auto vars = merge_vars(a.vars_, b.vars_);
  *b_out = b.aligned_to(vars);
  return a.aligned_to(vars);
}

Poly Poly::operator+(const Poly& o) const {
  Poly b;
  Poly a = align_binary(*this, o, &b);
  for (const auto& [m, c] : b.terms_) a.add_term(m, c);
  return a;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator-() const {
  Poly out(vars_);
  for (const auto& [m, c] : terms_) out.terms_[m] = -c;
  return out;
}

Poly Poly::scaled(const Rational& c) const {
  Poly out(vars_);
  if (c.is_zero()) return out;
  for (const auto& [m, k] : terms_) out.terms_[m] = k * c;
  return out;
}

Poly Poly::operator*(const Poly& o) const {
  Poly b;
  Poly a = align_binary(*this, o, &b);
  Poly out(a.vars_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m{std::vector<unsigned>(a.vars_.size(), 0)};
      for (std::size_t i = 0; i < m.exps.size(); ++i) m.exps[i] = ma.exps[i] + mb.exps[i];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

Poly Poly::pow(unsigned e) const {
  Poly acc = Poly::constant(Rational(1), vars_);
  Poly base = *this;
  while (e) {
    if (e & 1u) acc = acc * base;
    base = base * base;
    e >>= 1u;
  }
  return acc;
}

Poly Poly::derivative(const std::string& var) const {
  auto idx = var_index(var);
  Poly out(vars_);
  if (!idx) return out;
  for (const auto& [m, c] : terms_) {
    if (m.exps[*idx] == 0) continue;
    Monomial nm = m;
    unsigned e = nm.exps[*idx];
    nm.exps[*idx] = e - 1;
    out.add_term(nm, c * Rational(static_cast<long long>(e)));
  }
  return out;
}

Poly Poly::homogeneous_part(unsigned d) const {
  Poly out(vars_);
  for (const auto& [m, c] : terms_)
    if (m.degree() == d) out.terms_[m] = c;
  return out;
}

bool operator==(const Poly& a, const Poly& b) {
  Poly rb;
  Poly ra = align_binary(a, b, &rb);
  return ra.terms_ == rb.terms_;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Print highest degree first for readability; map iterates ascending.
  std::vector<const Terms::value_type*> ordered;
  for (const auto& t : terms_) ordered.push_back(&t);
  std::reverse(ordered.begin(), ordered.end());
  for (const auto* t : ordered) {
    const auto& [m, c] = *t;
    Rational k = c;
    if (first) {
      if (k.sign() < 0) {
        os << "-";
        k = -k;
      }
    } else {
      os << (k.sign() < 0 ? " - " : " + ");
      if (k.sign() < 0) k = -k;
    }
    first = false;
    bool printed_coeff = false;
    if (m.is_constant() || k != Rational(1)) {
      os << k.str();
      printed_coeff = true;
    }
    bool first_var = true;
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      if (m.exps[i] == 0) continue;
      if (printed_coeff || !first_var) os << "*";
      os << vars_[i];
      if (m.exps[i] > 1) os << "^" << m.exps[i];
      first_var = false;
      printed_coeff = true;
    }
  }
  return os.str();
}

Rational evaluate(const Poly& p, const std::map<std::string, Rational>& point) {
  std::vector<Rational> vals(p.vars().size());
  for (std::size_t i = 0; i < p.vars().size(); ++i) {
    auto it = point.find(p.vars()[i]);
    if (it == point.end()) {
      // Only an error if the variable actually occurs.
      bool occurs = false;
      for (const auto& [m, c] : p.terms())
        if (m.exps[i] > 0) { occurs = true; break; }
      if (occurs) throw std::invalid_argument("evaluate: missing binding for variable " + p.vars()[i]);
      vals[i] = Rational(0);
    } else {
      vals[i] = it->second;
    }
  }
  Rational acc(0);
  for (const auto& [m, c] : p.terms()) {
    Rational t = c;
    for (std::size_t i = 0; i < m.exps.size(); ++i)
      if (m.exps[i]) t *= pow(vals[i], m.exps[i]);
    acc += t;
  }
  return acc;
}

double evaluate_double(const Poly& p, const std::vector<double>& vals) {
  if (vals.size() != p.vars().size()) throw std::invalid_argument("evaluate_double: arity mismatch");
  double acc = 0;
  for (const auto& [m, c] : p.terms()) {
    double t = c.to_double();
    for (std::size_t i = 0; i < m.exps.size(); ++i)
      for (unsigned k = 0; k < m.exps[i]; ++k) t *= vals[i];
    acc += t;
  }
  return acc;
}

Poly substitute(const Poly& p, const std::map<std::string, Poly>& bindings) {
  // Collect the full variable universe so products align cheaply.
  std::vector<std::string> universe = p.vars();
  for (const auto& [v, q] : bindings) universe = merge_vars(universe, q.vars());
  Poly out(universe);
  for (const auto& [m, c] : p.terms()) {
    Poly term = Poly::constant(c, universe);
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      if (m.exps[i] == 0) continue;
      auto it = bindings.find(p.vars()[i]);
      Poly base = (it == bindings.end()) ? Poly::var(p.vars()[i], universe) : it->second.aligned_to(universe);
      term = term * base.pow(m.exps[i]);
    }
    out = out + term;
  }
  return out;
}

Poly lie_derivative(const Poly& V, const VectorField& field) {
  std::vector<std::string> universe = V.vars();
  for (const auto& [v, f] : field.rhs) universe = merge_vars(universe, f.vars());
  Poly acc(universe);
  for (std::size_t i = 0; i < V.vars().size(); ++i) {
    const std::string& xi = V.vars()[i];
    Poly d = V.derivative(xi);
    if (d.is_zero()) continue;
    auto it = field.rhs.find(xi);
    if (it == field.rhs.end())
      throw std::invalid_argument("lie_derivative: variable " + xi + " not defined by the vector field");
    acc = acc + d.aligned_to(universe) * it->second.aligned_to(universe);
  }
  return acc;
}

std::optional<Poly> exact_divide(const Poly& p, const Poly& q) {
  if (q.is_zero()) return std::nullopt;
  if (p.is_zero()) return Poly(p.vars());
  Poly rb;
  Poly ra = align_binary(p, q, &rb);
  // Long division by the leading term in graded-lex order.
  const auto& lead = *rb.terms().rbegin();
  Poly rem = ra;
  Poly quot(ra.vars());
  while (!rem.is_zero()) {
    const auto& rl = *rem.terms().rbegin();
    Monomial qm{std::vector<unsigned>(ra.vars().size(), 0)};
    for (std::size_t i = 0; i < qm.exps.size(); ++i) {
      if (rl.first.exps[i] < lead.first.exps[i]) return std::nullopt;
      qm.exps[i] = rl.first.exps[i] - lead.first.exps[i];
    }
    Rational qc = rl.second / lead.second;
    Poly t(ra.vars());
    t.add_term(qm, qc);
    quot = quot + t;
    rem = rem - t * rb;
  }
  return quot;
}

std::optional<RatMatrix> quadratic_form(const Poly& p, bool homogeneous_only) {
  const std::size_t n = p.vars().size();
  RatMatrix Q(n, n);
  Q.setConstant(Rational(0));
  for (const auto& [m, c] : p.terms()) {
    if (m.degree() != 2) {
      if (homogeneous_only) return std::nullopt;
      continue;
    }
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      for (unsigned k = 0; k < m.exps[i]; ++k) idx.push_back(i);
    if (idx.size() != 2) return std::nullopt;
    if (idx[0] == idx[1]) {
      Q(idx[0], idx[0]) += c;
    } else {
      Rational half = c / Rational(2);
      Q(idx[0], idx[1]) += half;
      Q(idx[1], idx[0]) += half;
    }
  }
  if (homogeneous_only && p.degree() > 2) return std::nullopt;
  return Q;
}

Poly poly_from_quadratic_form(const RatMatrix& Q, const std::vector<std::string>& vars) {
  Poly out(vars);
  const auto n = static_cast<std::size_t>(Q.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Rational c = (i == j) ? Q(i, i) : Q(i, j) + Q(j, i);
      if (c.is_zero()) continue;
      Monomial m{std::vector<unsigned>(vars.size(), 0)};
      m.exps[i] += 1;
      m.exps[j] += 1;
      out.add_term(m, c);
    }
  }
  return out;
}

std::size_t hash_value(const Poly& p) {
  std::size_t h = 1469598103934665603ull;
  auto mixs = [&h](const std::string& s) {
    for (char c : s) {
      h ^= static_cast<std::size_t>(static_cast<unsigned char>(c));
      h *= 1099511628211ull;
    }
  };
  for (const auto& v : p.vars()) mixs(v);
  mixs(p.str());
  return h;
}

}  // namespace swcert
