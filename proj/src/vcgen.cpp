#include <algorithm>
#include <set>

#include "swcert/program_ir.hpp"
#include "swcert/vc.hpp"

namespace swcert {

bool VerificationCondition::has_exp() const {
  return std::any_of(conclusion.begin(), conclusion.end(),
                     [](const ExpTerm& t) { return !t.exponent.is_zero() && !t.poly.is_zero(); });
}

Poly VerificationCondition::plain_conclusion() const {
  Poly acc;
  for (const auto& t : conclusion) {
    if (!t.exponent.is_zero() && !t.poly.is_zero())
      throw std::logic_error("plain_conclusion: VC carries exponential coefficients");
    acc = acc + t.poly;
  }
  return acc;
}

Poly VerificationCondition::plain_conclusion_part() const {
  Poly acc;
  for (const auto& t : conclusion)
    if (t.exponent.is_zero()) acc = acc + t.poly;
  return acc;
}

LyapunovAssignment LyapunovAssignment::from_model(const SwitchedModel& m) {
  LyapunovAssignment a;
  a.V = m.lyapunov;
  a.rates = m.rates;
  a.sigma = m.sigma;
  return a;
}

LyapunovAssignment LyapunovAssignment::common(const SwitchedModel& m, const Poly& V) {
  LyapunovAssignment a;
  for (const auto& md : m.modes) a.V[md.id] = V;
  return a;
}

bool LyapunovAssignment::covers(const SwitchedModel& m) const {
  return std::all_of(m.modes.begin(), m.modes.end(),
                     [&](const Mode& md) { return V.count(md.id) != 0; });
}

bool LyapunovAssignment::is_common() const {
  if (V.empty()) return false;
  const Poly& first = V.begin()->second;
  return std::all_of(V.begin(), V.end(), [&](const auto& kv) { return kv.second == first; });
}

namespace {

std::vector<std::string> used_vars(const Predicate& hyp, const std::vector<ExpTerm>& concl) {
  std::vector<std::string> out;
  auto absorb = [&out](const Poly& p) {
    for (std::size_t i = 0; i < p.vars().size(); ++i) {
      bool occurs = false;
      for (const auto& [m, c] : p.terms())
        if (m.exps[i] > 0) occurs = true;
      if (occurs && std::find(out.begin(), out.end(), p.vars()[i]) == out.end())
        out.push_back(p.vars()[i]);
    }
  };
  for (const auto& d : hyp.disjuncts)
    for (const auto& a : d) absorb(a.poly);
  for (const auto& t : concl) absorb(t.poly);
  return out;
}

VerificationCondition make_vc(std::string id, VcOrigin origin, Predicate hyp, Poly concl, Cmp cmp,
                              bool excluded_origin) {
  VerificationCondition vc;
  vc.id = std::move(id);
  vc.origin = std::move(origin);
  vc.hypothesis = std::move(hyp);
  vc.conclusion = {ExpTerm{std::move(concl), Rational(0)}};
  vc.cmp = cmp;
  vc.excluded_origin = excluded_origin;
  vc.vars = used_vars(vc.hypothesis, vc.conclusion);
  return vc;
}

VerificationCondition positivity_vc(const std::string& rule, const std::string& mode, const Poly& V,
                                    const Predicate& hyp) {
  return make_vc("positivity:" + mode, {rule, "positivity", {mode}}, hyp, V, Cmp::Gt, true);
}

VerificationCondition radial_vc(const std::string& rule, const std::string& mode, const Poly& V) {
  VerificationCondition vc =
      make_vc("radial:" + mode, {rule, "radial-unbounded", {mode}}, Predicate::top(), V, Cmp::Gt, false);
  vc.marker = VerificationCondition::Marker::Radial;
  return vc;
}

const Poly& lookup_V(const LyapunovAssignment& A, const std::string& mode) {
  auto it = A.V.find(mode);
  if (it == A.V.end()) throw VcGenError("missing Lyapunov function for mode " + mode);
  return it->second;
}

}  // namespace

std::vector<VerificationCondition> gen_clf(const SwitchedModel& m, const Poly& V) {
  if (m.kind != SwitchKind::Arbitrary && m.kind != SwitchKind::StateDependent)
    throw VcGenError("common-Lyapunov rule applies to arbitrary or state-dependent switching only");
  std::vector<VerificationCondition> out;
  const std::string rule = "clf";
  out.push_back(positivity_vc(rule, "common", V, Predicate::top()));
  out.push_back(radial_vc(rule, "common", V));
  for (const auto& md : m.modes) {
    Poly lie = lie_derivative(V, md.field);
    out.push_back(make_vc("lie:" + md.id, {rule, "lie-negative", {md.id}}, md.domain.closure(), lie,
                          Cmp::Lt, true));
  }
  return out;
}

std::vector<VerificationCondition> gen_mlf_state(const SwitchedModel& m, const LyapunovAssignment& A) {
  if (m.kind != SwitchKind::StateDependent) throw VcGenError("rule applies to state-dependent switching");
  std::vector<VerificationCondition> out;
  const std::string rule = "mlf-state";
  for (const auto& md : m.modes) {
    const Poly& V = lookup_V(A, md.id);
    out.push_back(positivity_vc(rule, md.id, V, md.domain.closure()));
    out.push_back(radial_vc(rule, md.id, V));
    Poly lie = lie_derivative(V, md.field);
    out.push_back(make_vc("lie:" + md.id, {rule, "lie-negative", {md.id}}, md.domain.closure(), lie,
                          Cmp::Lt, true));
  }
  for (std::size_t i = 0; i < m.modes.size(); ++i) {
    for (std::size_t j = i + 1; j < m.modes.size(); ++j) {
      const Mode& p = m.modes[i];
      const Mode& q = m.modes[j];
      Predicate overlap = p.domain.and_with(q.domain);
      Poly diff = lookup_V(A, p.id) - lookup_V(A, q.id);
      out.push_back(make_vc("compat:" + p.id + ":" + q.id + ":le",
                            {rule, "compatibility", {p.id, q.id}}, overlap, diff, Cmp::Le, false));
      out.push_back(make_vc("compat:" + p.id + ":" + q.id + ":ge",
                            {rule, "compatibility", {p.id, q.id}}, overlap, diff, Cmp::Ge, false));
    }
  }
  return out;
}

std::vector<VerificationCondition> gen_mlf_guarded(const SwitchedModel& m, const LyapunovAssignment& A) {
  if (m.kind != SwitchKind::Guarded) throw VcGenError("rule applies to guarded switching");
  std::vector<VerificationCondition> out;
  const std::string rule = "mlf-guarded";
  for (const auto& md : m.modes) {
    const Poly& V = lookup_V(A, md.id);
    out.push_back(positivity_vc(rule, md.id, V, md.domain.closure()));
    out.push_back(radial_vc(rule, md.id, V));
    Poly lie = lie_derivative(V, md.field);
    out.push_back(make_vc("lie:" + md.id, {rule, "lie-negative", {md.id}}, md.domain.closure(), lie,
                          Cmp::Lt, true));
  }
  int k = 0;
  for (const auto& t : m.transitions) {
    Poly diff = lookup_V(A, t.to) - lookup_V(A, t.from);
    std::string id = "descent:" + t.from + ":" + t.to;
    if (std::any_of(out.begin(), out.end(),
                    [&](const VerificationCondition& v) { return v.id == id; }))
      id += "#" + std::to_string(++k);
    out.push_back(make_vc(id, {rule, "guard-descent", {t.from, t.to}}, t.guard, diff, Cmp::Le, false));
  }
  return out;
}

Rational dwell_exponent_stability(const Rational& lambda_p, const Rational& theta_pq,
                                  const std::optional<Rational>& Theta_p, const Rational& lambda_q,
                                  const std::optional<Rational>& Theta_q) {
  (void)Theta_p;
  const bool p_stable = lambda_p > Rational(0);
  const bool q_stable = lambda_q > Rational(0);
  Rational e(0);
  if (p_stable) e += lambda_p * theta_pq;
  if (!q_stable) {
    if (!Theta_q) throw VcGenError("unstable target mode requires a maximum dwell time");
    e += lambda_q * *Theta_q;
  }
  return e;
}

std::vector<VerificationCondition> gen_mlf_timed(const SwitchedModel& m, const LyapunovAssignment& A) {
  if (m.kind != SwitchKind::Timed) throw VcGenError("rule applies to timed switching");
  std::vector<VerificationCondition> out;
  const std::string rule = "mlf-timed";

  // Rates are mandatory; unstable modes need a maximum dwell time because the
  // plant bound tau <= Theta_p is what caps their growth.
  std::optional<Rational> min_stable_rate;
  for (const auto& md : m.modes) {
    auto it = A.rates.find(md.id);
    if (it == A.rates.end()) throw VcGenError("missing rate annotation for mode " + md.id);
    if (it->second > Rational(0)) {
      if (!min_stable_rate || it->second < *min_stable_rate) min_stable_rate = it->second;
    } else if (!md.max_dwell) {
      throw VcGenError("unstable mode " + md.id + " (rate <= 0) requires maxdwell");
    }
  }
  const bool sigma_explicit = A.sigma.has_value();
  Rational sigma = A.sigma.value_or(min_stable_rate ? *min_stable_rate / Rational(2) : Rational(0));
  if (sigma_explicit) {
    if (!(sigma > Rational(0)) || (min_stable_rate && !(sigma < *min_stable_rate)))
      throw VcGenError("sigma must lie in (0, min stable rate)");
  }

  for (const auto& md : m.modes) {
    const Poly& V = lookup_V(A, md.id);
    out.push_back(positivity_vc(rule, md.id, V, Predicate::top()));
    out.push_back(radial_vc(rule, md.id, V));
    const Rational lambda = A.rates.at(md.id);
    Poly target = -lie_derivative(V, md.field) - V.scaled(lambda);
    out.push_back(make_vc("rate:" + md.id, {rule, "exponential-rate", {md.id}}, md.domain.closure(),
                          target, Cmp::Ge, false));
  }

  for (const auto& t : m.transitions) {
    const Rational lp = A.rates.at(t.from);
    const Rational lq = A.rates.at(t.to);
    const Mode* from = m.find_mode(t.from);
    const Mode* to = m.find_mode(t.to);
    const Rational theta = t.min_dwell.value_or(Rational(0));
    Rational e_stab = dwell_exponent_stability(lp, theta, from->max_dwell, lq, to->max_dwell);

    auto dwell_vc = [&](const std::string& tag, const std::string& premise, const Rational& expnt) {
      VerificationCondition vc;
      vc.id = tag + ":" + t.from + ":" + t.to;
      vc.origin = {rule, premise, {t.from, t.to}};
      vc.hypothesis = Predicate::top();
      if (expnt.is_zero()) {
        vc.conclusion = {ExpTerm{lookup_V(A, t.to) - lookup_V(A, t.from), Rational(0)}};
      } else {
        vc.conclusion = {ExpTerm{lookup_V(A, t.to), Rational(0)}, ExpTerm{-lookup_V(A, t.from), expnt}};
      }
      vc.cmp = Cmp::Le;
      vc.vars = used_vars(vc.hypothesis, vc.conclusion);
      return vc;
    };

    out.push_back(dwell_vc("dwell-stab", "dwell-stability", e_stab));
    // Attractivity family: sigma-shifted exponent when sigma is pinned by the
    // model; otherwise the sigma -> 0 boundary coincides with the stability
    // family and certifies decay margins only up to that boundary.
    Rational shift = (lp > Rational(0)) ? theta : from->max_dwell.value_or(Rational(0));
    Rational e_attr = sigma_explicit ? e_stab - sigma * shift : e_stab;
    out.push_back(dwell_vc("dwell-attr", "dwell-attractivity", e_attr));
  }
  return out;
}

std::vector<VerificationCondition> gen_controlled_unfold(const SwitchedModel& m,
                                                         const LyapunovAssignment& A) {
  if (m.kind != SwitchKind::Controlled) throw VcGenError("rule applies to controlled switching");
  std::vector<VerificationCondition> out;
  const std::string rule = "ctrl-unfold";
  for (const auto& md : m.modes) {
    const Poly& V = lookup_V(A, md.id);
    out.push_back(positivity_vc(rule, md.id, V, md.domain.closure()));
    out.push_back(radial_vc(rule, md.id, V));
    Poly lie = lie_derivative(V, md.field);
    out.push_back(make_vc("lie:" + md.id, {rule, "lie-negative", {md.id}}, md.domain.closure(), lie,
                          Cmp::Lt, true));
  }
  std::map<std::string, int> seen;
  for (const auto& path : controller_paths(m)) {
    if (path.stay) continue;
    Poly Vq = lookup_V(A, path.to);
    if (!path.resets.empty()) Vq = substitute(Vq, path.resets);
    Poly diff = Vq - lookup_V(A, path.from);
    std::string base = "descent:" + path.from + ":" + path.to;
    int n = seen[base]++;
    std::string id = n == 0 ? base : base + "#" + std::to_string(n);
    out.push_back(make_vc(id, {rule, "unfold-descent", {path.from, path.to}}, path.tests, diff,
                          Cmp::Le, false));
  }
  return out;
}

namespace {

// Is the atom already granted by the mode's domain closure (same polynomial,
// same-or-stronger comparison)? Purely syntactic.
bool implied_by_domain(const Atom& a, const Predicate& domain_closure) {
  for (const auto& d : domain_closure.disjuncts) {
    bool found = false;
    for (const auto& b : d) {
      if (b.poly == a.poly && (b.cmp == a.cmp || (a.cmp == Cmp::Ge && (b.cmp == Cmp::Gt || b.cmp == Cmp::Eq))))
        found = true;
      Poly s = b.poly + a.poly;
      if (s.is_zero() && ((a.cmp == Cmp::Ge && b.cmp == Cmp::Le) || (a.cmp == Cmp::Ge && b.cmp == Cmp::Eq)))
        found = true;
    }
    if (!found) return false;  // must hold on every disjunct of the domain
  }
  return !domain_closure.disjuncts.empty();
}

}  // namespace

std::vector<VerificationCondition> gen_restricted_attractivity(const SwitchedModel& m, const Poly& V,
                                                               const Predicate& region) {
  if (m.kind != SwitchKind::StateDependent)
    throw VcGenError("restricted attractivity applies to state-dependent switching");
  if (region.is_true()) return gen_clf(m, V);

  std::vector<VerificationCondition> out;
  const std::string rule = "clf-restricted";
  out.push_back(positivity_vc(rule, "common", V, Predicate::top()));
  out.push_back(radial_vc(rule, "common", V));

  for (const auto& md : m.modes) {
    Poly lie = lie_derivative(V, md.field);
    // Stability half: sublevel sets stay invariant everywhere in the domain.
    out.push_back(make_vc("lie-stab:" + md.id, {rule, "lie-nonincrease", {md.id}}, md.domain.closure(),
                          -lie, Cmp::Ge, false));
    // Attractivity half: strict decrease inside the applicable region.
    out.push_back(make_vc("lie-region:" + md.id, {rule, "lie-negative-region", {md.id}},
                          region.and_with(md.domain.closure()), lie, Cmp::Lt, true));
  }

  // Region invariance obligations, one per (mode, region atom) that the mode
  // domain does not already grant.
  for (const auto& md : m.modes) {
    Predicate domc = md.domain.closure();
    std::set<std::string> emitted;
    int k = 0;
    for (const auto& disjunct : region.disjuncts) {
      Conjunct probe = disjunct;
      for (const auto& da : domc.disjuncts.empty() ? Conjunct{} : domc.disjuncts.front()) probe.push_back(da);
      if (conjunct_unsatisfiable(probe)) continue;
      for (const auto& a : disjunct) {
        Poly p = a.poly;
        Cmp sense = a.cmp;
        if (sense == Cmp::Le || sense == Cmp::Lt) {
          p = -p;
          sense = sense == Cmp::Le ? Cmp::Ge : Cmp::Gt;
        }
        if (sense == Cmp::Eq) continue;
        Atom norm{p, sense};
        if (implied_by_domain(norm, domc)) continue;
        std::string key = md.id + "|" + norm.str();
        if (!emitted.insert(key).second) continue;
        VerificationCondition vc;
        vc.id = "region-inv:" + md.id + "#" + std::to_string(k++);
        vc.origin = {rule, "region-invariant", {md.id}};
        vc.marker = VerificationCondition::Marker::SetInvariance;
        vc.inv_mode = md.id;
        vc.inv_poly = p;
        vc.inv_sense = sense;
        vc.hypothesis = domc;
        vc.conclusion = {ExpTerm{p, Rational(0)}};
        vc.cmp = sense;
        vc.vars = used_vars(vc.hypothesis, vc.conclusion);
        out.push_back(std::move(vc));
      }
    }
  }
  return out;
}

}  // namespace swcert
