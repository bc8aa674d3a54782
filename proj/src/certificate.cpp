#include "swcert/certificate.hpp"

#include <stdexcept>

namespace swcert {

using nlohmann::ordered_json;

Verdict Verdict::proved(std::vector<Certificate> cs) {
  Verdict v;
  v.status = VerdictStatus::Proved;
  v.certificates = std::move(cs);
  return v;
}

Verdict Verdict::refuted(Counterexample cx) {
  Verdict v;
  v.status = VerdictStatus::Refuted;
  v.counterexample = std::move(cx);
  return v;
}

Verdict Verdict::inconclusive(std::string why) {
  Verdict v;
  v.status = VerdictStatus::Inconclusive;
  v.reason = std::move(why);
  return v;
}

ordered_json poly_to_json(const Poly& p) {
  ordered_json j;
  j["vars"] = p.vars();
  ordered_json terms = ordered_json::array();
  for (const auto& [m, c] : p.terms()) {
    ordered_json t;
    t["c"] = c.str();
    t["e"] = m.exps;
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

Poly poly_from_json(const ordered_json& j) {
  std::vector<std::string> vars = j.at("vars").get<std::vector<std::string>>();
  Poly p(vars);
  for (const auto& t : j.at("terms")) {
    Monomial m{t.at("e").get<std::vector<unsigned>>()};
    p.add_term(m, Rational::parse(t.at("c").get<std::string>()));
  }
  return p;
}

namespace {

ordered_json matrix_to_json(const RatMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

RatMatrix matrix_from_json(const ordered_json& j) {
  const auto r = j.size();
  const auto c = r == 0 ? 0 : j.at(0).size();
  RatMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k) m(i, k) = Rational::parse(j.at(i).at(k).get<std::string>());
  return m;
}

ordered_json vector_to_json(const RatVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i).str());
  return out;
}

RatVector vector_from_json(const ordered_json& j) {
  RatVector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = Rational::parse(j.at(i).get<std::string>());
  return v;
}

}  // namespace

ordered_json certificate_to_json(const Certificate& c) {
  ordered_json j;
  switch (c.kind) {
    case Certificate::Kind::PdFactorization: {
      j["kind"] = "pd-factorization";
      const auto& pd = *c.pd;
      j["vars"] = pd.vars;
      j["gram"] = matrix_to_json(pd.gram);
      j["perm"] = pd.perm;
      j["L"] = matrix_to_json(pd.L);
      j["D"] = vector_to_json(pd.D);
      j["strict"] = pd.strict;
      break;
    }
    case Certificate::Kind::Sos: {
      j["kind"] = "sos";
      const auto& s = *c.sos;
      j["vars"] = s.vars;
      j["target"] = poly_to_json(s.target);
      ordered_json blocks = ordered_json::array();
      for (const auto& b : s.blocks) {
        ordered_json jb;
        jb["generator"] = poly_to_json(b.generator);
        ordered_json basis = ordered_json::array();
        for (const auto& m : b.basis) basis.push_back(m.exps);
        jb["basis"] = std::move(basis);
        jb["gram"] = matrix_to_json(b.gram);
        blocks.push_back(std::move(jb));
      }
      j["blocks"] = std::move(blocks);
      ordered_json eqs = ordered_json::array();
      for (const auto& e : s.eqs) {
        ordered_json je;
        je["constraint"] = poly_to_json(e.constraint);
        je["multiplier"] = poly_to_json(e.multiplier);
        eqs.push_back(std::move(je));
      }
      j["eqs"] = std::move(eqs);
      j["eps"] = s.eps.str();
      j["eps_power"] = s.eps_power;
      break;
    }
    case Certificate::Kind::ExpComparison: {
      j["kind"] = "exp-comparison";
      j["exponent"] = c.exp->exponent.str();
      j["budget"] = c.exp->budget;
      j["lower"] = c.exp->bound_lower.str();
      j["upper"] = c.exp->bound_upper.str();
      j["direction"] = c.exp->direction;
      ordered_json inner = ordered_json::array();
      for (const auto& ic : c.exp->inner) inner.push_back(certificate_to_json(ic));
      j["inner"] = std::move(inner);
      break;
    }
    case Certificate::Kind::Vacuous:
      j["kind"] = "vacuous";
      j["note"] = c.note;
      break;
  }
  return j;
}

Certificate certificate_from_json(const ordered_json& j) {
  Certificate c;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pd-factorization") {
    c.kind = Certificate::Kind::PdFactorization;
    PdCertificate pd;
    pd.vars = j.at("vars").get<std::vector<std::string>>();
    pd.gram = matrix_from_json(j.at("gram"));
    pd.perm = j.at("perm").get<std::vector<int>>();
    pd.L = matrix_from_json(j.at("L"));
    pd.D = vector_from_json(j.at("D"));
    pd.strict = j.at("strict").get<bool>();
    c.pd = std::move(pd);
  } else if (kind == "sos") {
    c.kind = Certificate::Kind::Sos;
    SosCertificate s;
    s.vars = j.at("vars").get<std::vector<std::string>>();
    s.target = poly_from_json(j.at("target"));
    for (const auto& jb : j.at("blocks")) {
      SosBlock b;
      b.generator = poly_from_json(jb.at("generator"));
      for (const auto& e : jb.at("basis")) b.basis.push_back(Monomial{e.get<std::vector<unsigned>>()});
      b.gram = matrix_from_json(jb.at("gram"));
      s.blocks.push_back(std::move(b));
    }
    for (const auto& je : j.at("eqs")) {
      EqMultiplier e;
      e.constraint = poly_from_json(je.at("constraint"));
      e.multiplier = poly_from_json(je.at("multiplier"));
      s.eqs.push_back(std::move(e));
    }
    s.eps = Rational::parse(j.at("eps").get<std::string>());
    s.eps_power = j.at("eps_power").get<unsigned>();
    c.sos = std::move(s);
  } else if (kind == "exp-comparison") {
    c.kind = Certificate::Kind::ExpComparison;
    auto e = std::make_shared<ExpComparisonCertificate>();
    e->exponent = Rational::parse(j.at("exponent").get<std::string>());
    e->budget = j.at("budget").get<unsigned>();
    e->bound_lower = Rational::parse(j.at("lower").get<std::string>());
    e->bound_upper = Rational::parse(j.at("upper").get<std::string>());
    e->direction = j.at("direction").get<std::string>();
    for (const auto& ij : j.at("inner")) e->inner.push_back(certificate_from_json(ij));
    c.exp = std::move(e);
  } else if (kind == "vacuous") {
    c.kind = Certificate::Kind::Vacuous;
    c.note = j.value("note", "");
  } else {
    throw std::invalid_argument("certificate_from_json: unknown kind " + kind);
  }
  return c;
}

ordered_json counterexample_to_json(const Counterexample& c) {
  ordered_json j;
  j["vc"] = c.vc_id;
  ordered_json pt;
  for (const auto& [k, v] : c.point) pt[k] = v.str();
  j["point"] = std::move(pt);
  j["value"] = c.witnessed_value.str();
  j["detail"] = c.detail;
  return j;
}

Counterexample counterexample_from_json(const ordered_json& j) {
  Counterexample c;
  c.vc_id = j.at("vc").get<std::string>();
  for (const auto& [k, v] : j.at("point").items()) c.point[k] = Rational::parse(v.get<std::string>());
  c.witnessed_value = Rational::parse(j.at("value").get<std::string>());
  c.detail = j.value("detail", "");
  return c;
}

namespace {

// PSD re-check used by the replayer: exact Gaussian elimination written
// independently of ldlt_analyze (column order fixed, no witness machinery).
bool replay_psd(const RatMatrix& Q, std::string* error) {
  const int n = static_cast<int>(Q.rows());
  RatMatrix a = Q;
  std::vector<bool> done(n, false);
  for (int step = 0; step < n; ++step) {
    int piv = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && a(i, i).sign() > 0) {
        piv = i;
        break;
      }
    if (piv < 0) break;
    done[piv] = true;
    Rational d = a(piv, piv);
    for (int i = 0; i < n; ++i) {
      if (done[i] || a(i, piv).is_zero()) continue;
      Rational f = a(i, piv) / d;
      for (int j = 0; j < n; ++j)
        if (!done[j]) a(i, j) = a(i, j) - f * a(piv, j);
      // keep symmetry explicitly
    }
    for (int j = 0; j < n; ++j)
      if (!done[j]) a(piv, j) = a(j, piv) = Rational(0);
  }
  for (int i = 0; i < n; ++i) {
    if (done[i]) continue;
    for (int j = 0; j < n; ++j) {
      if (done[j]) continue;
      if (!a(i, j).is_zero()) {
        if (error) *error = "gram matrix is not positive semidefinite";
        return false;
      }
    }
  }
  return true;
}

Poly gram_poly(const std::vector<std::string>& vars, const std::vector<Monomial>& basis,
               const RatMatrix& Q) {
  Poly acc(vars);
  const int n = static_cast<int>(basis.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (Q(i, j).is_zero()) continue;
      Monomial m{std::vector<unsigned>(vars.size(), 0)};
      for (std::size_t k = 0; k < vars.size(); ++k) m.exps[k] = basis[i].exps[k] + basis[j].exps[k];
      acc.add_term(m, Q(i, j));
    }
  }
  return acc;
}

}  // namespace

std::optional<Poly> replay_certificate(const Certificate& c, std::string* error) {
  switch (c.kind) {
    case Certificate::Kind::Vacuous:
      return Poly{};
    case Certificate::Kind::PdFactorization: {
      const auto& pd = *c.pd;
      if (!ldlt_replay(pd.gram, pd.perm, pd.L, pd.D, pd.strict)) {
        if (error) *error = "stored factorization does not reproduce the Gram matrix";
        return std::nullopt;
      }
      return poly_from_quadratic_form(pd.gram, pd.vars);
    }
    case Certificate::Kind::Sos: {
      const auto& s = *c.sos;
      Poly acc(s.vars);
      for (const auto& b : s.blocks) {
        const int n = static_cast<int>(b.basis.size());
        if (b.gram.rows() != n || b.gram.cols() != n) {
          if (error) *error = "gram dimension mismatch";
          return std::nullopt;
        }
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (b.gram(i, j) != b.gram(j, i)) {
              if (error) *error = "gram matrix not symmetric";
              return std::nullopt;
            }
        if (!replay_psd(b.gram, error)) return std::nullopt;
        acc = acc + b.generator.aligned_to(s.vars) * gram_poly(s.vars, b.basis, b.gram);
      }
      for (const auto& e : s.eqs) acc = acc + e.multiplier.aligned_to(s.vars) * e.constraint.aligned_to(s.vars);
      if (!s.eps.is_zero()) {
        Poly sq(s.vars);
        for (const auto& v : s.vars) {
          Poly x = Poly::var(v, s.vars);
          sq = sq + x * x;
        }
        acc = acc + sq.pow(s.eps_power).scaled(s.eps);
      }
      if (!(acc == s.target)) {
        if (error) *error = "certificate identity does not reproduce the target";
        return std::nullopt;
      }
      return s.target;
    }
    case Certificate::Kind::ExpComparison: {
      const auto& e = *c.exp;
      // The enclosure itself is re-derivable: check lower <= upper and that
      // the claimed bounds actually bracket the recomputed enclosure.
      if (e.bound_lower > e.bound_upper) {
        if (error) *error = "exp enclosure is inverted";
        return std::nullopt;
      }
      ExpBound chk = exp_enclosure(e.exponent, e.budget == 0 ? 30 : e.budget);
      if (chk.lower > e.bound_lower || chk.upper < e.bound_upper) {
        // Stored bounds must be at least as loose as a fresh enclosure.
        if (e.bound_lower > chk.upper || e.bound_upper < chk.lower) {
          if (error) *error = "exp enclosure is not reproducible";
          return std::nullopt;
        }
      }
      Poly last;
      for (const auto& ic : e.inner) {
        auto p = replay_certificate(ic, error);
        if (!p) return std::nullopt;
        last = *p;
      }
      return last;
    }
  }
  if (error) *error = "unknown certificate kind";
  return std::nullopt;
}

bool counterexample_violates(const std::map<std::string, Rational>& point, const Poly& target,
                             bool strict) {
  Rational v = evaluate(target, point);
  return strict ? v.sign() <= 0 : v.sign() < 0;
}

}  // namespace swcert
