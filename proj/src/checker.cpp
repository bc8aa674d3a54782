#include "swcert/checker.hpp"

#include <algorithm>

namespace swcert {

namespace {

Counterexample cx_from_vector(const VerificationCondition& vc, const std::vector<std::string>& vars,
                              const RatVector& v, const Rational& value, const std::string& detail) {
  Counterexample cx;
  cx.vc_id = vc.id;
  for (std::size_t i = 0; i < vars.size(); ++i) cx.point[vars[i]] = v(static_cast<Eigen::Index>(i));
  cx.witnessed_value = value;
  cx.detail = detail;
  return cx;
}

std::map<std::string, Rational> origin_point(const std::vector<std::string>& vars) {
  std::map<std::string, Rational> pt;
  for (const auto& v : vars) pt[v] = Rational(0);
  return pt;
}

/// (target, strict) pairs normalized so each claim reads target >= 0 / > 0.
std::vector<std::pair<Poly, bool>> normalized_targets(const VerificationCondition& vc) {
  Poly c = vc.plain_conclusion();
  switch (vc.cmp) {
    case Cmp::Ge: return {{c, false}};
    case Cmp::Gt: return {{c, true}};
    case Cmp::Le: return {{-c, false}};
    case Cmp::Lt: return {{-c, true}};
    case Cmp::Eq: return {{c, false}, {-c, false}};
  }
  return {};
}

Verdict radial_check(const VerificationCondition& vc, const CheckerConfig& cfg) {
  const auto& vars = vc.vars;
  Poly V = vc.plain_conclusion().aligned_to(vars);
  if (V.is_zero()) return Verdict::inconclusive("zero candidate cannot be radially unbounded");
  const unsigned deg = V.degree();

  if (deg <= 2) {
    // For (possibly inhomogeneous) quadratics, radial unboundedness is
    // exactly positive definiteness of the quadratic part.
    Poly H = V.homogeneous_part(2);
    auto Q = quadratic_form(H);
    if (!Q) return Verdict::inconclusive("quadratic part is not a form");
    Verdict v = check_pd_quadratic(*Q, true, vars);
    if (v.is_proved()) return v;
    if (v.counterexample) {
      Counterexample cx = *v.counterexample;
      cx.vc_id = vc.id;
      cx.detail = "quadratic part is not positive definite along this direction; sublevel sets are unbounded";
      return Verdict::refuted(cx);
    }
    return v;
  }

  Poly H = V.homogeneous_part(deg);
  if (deg % 2 == 0) {
    // Sufficient criterion: the top-degree homogeneous part is positive
    // definite, witnessed by H - eps ||x||^deg being a sum of squares.
    SosOptions opt = cfg.sos;
    Poly sq(vars);
    for (const auto& v : vars) {
      Poly x = Poly::var(v, vars);
      sq = sq + x * x;
    }
    for (const Rational& eps : opt.eps_ladder) {
      Poly target = H.aligned_to(vars) - sq.pow(deg / 2).scaled(eps);
      auto cert = find_sos_certificate(target, {}, {}, false, false, vars, opt);
      if (cert) return Verdict::proved({*cert});
    }
  }
  // Sphere sampling for a direction where the top part is nonpositive.
  VerificationCondition probe = vc;
  probe.marker = VerificationCondition::Marker::None;
  probe.conclusion = {ExpTerm{H, Rational(0)}};
  probe.cmp = Cmp::Gt;
  probe.excluded_origin = true;
  FalsifyOptions fo = cfg.falsify;
  fo.budget = std::min<std::uint64_t>(fo.budget, 4000);
  if (auto cx = falsify(probe, fo)) {
    cx->vc_id = vc.id;
    cx->detail = "top-degree part is nonpositive along this direction: " + cx->detail;
    return Verdict::refuted(*cx);
  }
  return Verdict::inconclusive("radial unboundedness: sufficient criterion inconclusive");
}

}  // namespace

Verdict check_pd_quadratic(const RatMatrix& Q, bool strict, const std::vector<std::string>& vars) {
  const int n = static_cast<int>(Q.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (Q(i, j) != Q(j, i)) throw std::invalid_argument("check_pd_quadratic: matrix must be symmetric");
  LdltResult r = ldlt_analyze(Q);
  if (strict ? r.pd : r.psd) {
    PdCertificate pd;
    pd.vars = vars;
    pd.gram = Q;
    pd.perm = r.perm;
    pd.L = r.L;
    pd.D = r.D;
    pd.strict = strict;
    Certificate c;
    c.kind = Certificate::Kind::PdFactorization;
    c.pd = std::move(pd);
    return Verdict::proved({c});
  }
  Verdict v = Verdict::inconclusive("not positive definite");
  if (r.witness) {
    RatVector w = *r.witness;
    Rational val(0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) val += w(i) * Q(i, j) * w(j);
    Counterexample cx;
    for (std::size_t i = 0; i < vars.size() && static_cast<int>(i) < n; ++i) cx.point[vars[i]] = w(i);
    cx.witnessed_value = val;
    cx.detail = strict ? "v^T Q v <= 0" : "v^T Q v < 0";
    v = Verdict::refuted(cx);
  }
  return v;
}

Verdict check_exp_vc(const VerificationCondition& vc, const CheckerConfig& cfg) {
  // Group conclusion terms by exponent.
  std::map<Rational, Poly> groups;
  for (const auto& t : vc.conclusion) {
    auto it = groups.find(t.exponent);
    if (it == groups.end())
      groups.emplace(t.exponent, t.poly);
    else
      it->second = it->second + t.poly;
  }
  for (auto it = groups.begin(); it != groups.end();) {
    if (it->second.is_zero())
      it = groups.erase(it);
    else
      ++it;
  }

  if (groups.empty() || (groups.size() == 1 && groups.begin()->first.is_zero())) {
    VerificationCondition plain = vc;
    plain.conclusion = {ExpTerm{groups.empty() ? Poly{} : groups.begin()->second, Rational(0)}};
    return check_vc(plain, cfg);
  }

  if (groups.size() == 1) {
    // Common positive factor e^r: divide it out exactly.
    VerificationCondition plain = vc;
    plain.conclusion = {ExpTerm{groups.begin()->second, Rational(0)}};
    Verdict v = check_vc(plain, cfg);
    if (v.is_proved()) {
      auto ec = std::make_shared<ExpComparisonCertificate>();
      ec->exponent = groups.begin()->first;
      ec->budget = cfg.exp_budget;
      ExpBound b = exp_enclosure(ec->exponent, cfg.exp_budget);
      ec->bound_lower = b.lower;
      ec->bound_upper = b.upper;
      ec->direction = "common-factor";
      ec->inner = v.certificates;
      Certificate c;
      c.kind = Certificate::Kind::ExpComparison;
      c.exp = ec;
      return Verdict::proved({c});
    }
    if (v.counterexample) v.counterexample->vc_id = vc.id;
    return v;
  }

  if (groups.size() != 2 || groups.count(Rational(0)) == 0 ||
      (vc.cmp != Cmp::Le && vc.cmp != Cmp::Lt && vc.cmp != Cmp::Ge && vc.cmp != Cmp::Gt))
    return Verdict::inconclusive("unsupported exponential conclusion shape");

  // Normalize to P0 + P1 e^r <= 0 (strictness preserved).
  bool flip = (vc.cmp == Cmp::Ge || vc.cmp == Cmp::Gt);
  bool strict = cmp_is_strict(vc.cmp);
  Poly P0 = groups.at(Rational(0));
  Rational r;
  Poly P1;
  for (const auto& [e, p] : groups) {
    if (e.is_zero()) continue;
    r = e;
    P1 = p;
  }
  if (flip) {
    P0 = -P0;
    P1 = -P1;
  }
  const std::vector<std::string>& vars = vc.vars;

  unsigned budget = cfg.exp_budget;
  std::string last_reason = "enclosure budget exhausted";
  while (budget <= cfg.exp_budget_cap) {
    ExpBound b = exp_enclosure(r, budget);

    // Side condition: -P1 >= 0 on the hypothesis (the dwell shape has
    // P1 = -V_p with V_p the positive Lyapunov candidate).
    Poly NP1 = -P1;
    bool side_ok = true;
    std::vector<Certificate> side_certs;
    for (const auto& d : vc.hypothesis.disjuncts) {
      if (conjunct_unsatisfiable(d)) continue;
      auto cert = prove_on_set(NP1, constraints_of(d), false, false, vars, cfg.sos);
      if (!cert) {
        side_ok = false;
        break;
      }
      side_certs.push_back(*cert);
    }

    if (side_ok) {
      // P0 + P1 e^r <= P0 - NP1 * lower; prove the right side nonpositive.
      Poly reduced = NP1.scaled(b.lower) - P0;  // claim: reduced >= 0 (or > 0)
      bool all_ok = true;
      std::vector<Certificate> main_certs;
      for (const auto& d : vc.hypothesis.disjuncts) {
        if (conjunct_unsatisfiable(d)) continue;
        auto cert = prove_on_set(reduced, constraints_of(d), strict, vc.excluded_origin, vars, cfg.sos);
        if (!cert) {
          all_ok = false;
          break;
        }
        main_certs.push_back(*cert);
      }
      if (all_ok) {
        auto ec = std::make_shared<ExpComparisonCertificate>();
        ec->exponent = r;
        ec->budget = budget;
        ec->bound_lower = b.lower;
        ec->bound_upper = b.upper;
        ec->direction = "lower";
        ec->inner = side_certs;
        ec->inner.insert(ec->inner.end(), main_certs.begin(), main_certs.end());
        Certificate c;
        c.kind = Certificate::Kind::ExpComparison;
        c.exp = ec;
        return Verdict::proved({c});
      }
      last_reason = "no certificate for the enclosure-reduced condition";
    } else {
      last_reason = "could not establish the sign side condition for the exponential factor";
    }

    FalsifyOptions fo = cfg.falsify;
    fo.exp_budget = budget;
    if (auto cx = falsify(vc, fo)) return Verdict::refuted(*cx);
    budget *= 2;
  }
  return Verdict::inconclusive(last_reason);
}

Verdict check_vc(const VerificationCondition& vc_in, const CheckerConfig& cfg) {
  VerificationCondition vc = vc_in;
  vc.hypothesis.canonicalize();

  if (vc.marker == VerificationCondition::Marker::Radial) return radial_check(vc, cfg);
  if (vc.marker == VerificationCondition::Marker::SetInvariance)
    return Verdict::inconclusive("set-invariance obligations require the model context");

  // Vacuous hypotheses prove anything.
  bool any_sat = false;
  for (const auto& d : vc.hypothesis.disjuncts)
    if (!conjunct_unsatisfiable(d)) any_sat = true;
  if (!any_sat) {
    Certificate c;
    c.kind = Certificate::Kind::Vacuous;
    c.note = vc.hypothesis.is_false() ? "hypothesis is false" : "hypothesis set is empty";
    return Verdict::proved({c});
  }

  if (vc.has_exp()) return check_exp_vc(vc, cfg);

  // Origin obligations of excluded-origin conditions: when the hypothesis
  // admits the origin, the conclusion polynomial must vanish there exactly.
  Poly conclusion = vc.plain_conclusion();
  if (vc.excluded_origin) {
    auto origin = origin_point(vc.vars);
    if (vc.hypothesis.holds_at(origin)) {
      Rational at0 = evaluate(conclusion, origin);
      if (!at0.is_zero()) {
        Counterexample cx;
        cx.vc_id = vc.id;
        cx.point = origin;
        cx.witnessed_value = at0;
        cx.detail = "conclusion must vanish at the origin but evaluates to " + at0.str();
        return Verdict::refuted(cx);
      }
    }
  }

  std::vector<Certificate> certs;
  bool proved = true;
  for (const auto& [target, strict] : normalized_targets(vc)) {
    if (!proved) break;
    if (target.is_zero()) {
      if (strict) {
        proved = false;
        break;
      }
      Certificate c;
      c.kind = Certificate::Kind::Sos;
      c.sos = SosCertificate{vc.vars, Poly{}.aligned_to(vc.vars), {}, {}, Rational(0), 1};
      certs.push_back(c);
      continue;
    }
    // Quick refutation seed: a globally indefinite quadratic's witness may
    // already satisfy the hypothesis.
    if (target.degree() == 2) {
      if (auto Q = quadratic_form(target)) {
        LdltResult r = ldlt_analyze(*Q);
        if (!(strict ? r.pd : r.psd) && r.witness) {
          std::map<std::string, Rational> pt;
          for (std::size_t i = 0; i < vc.vars.size(); ++i)
            pt[vc.vars[i]] = (*r.witness)(static_cast<Eigen::Index>(i));
          if (!(vc.excluded_origin && std::all_of(pt.begin(), pt.end(), [](const auto& kv) {
                  return kv.second.is_zero();
                })) &&
              vc.hypothesis.holds_at(pt)) {
            Rational w;
            std::string detail;
            if (conclusion_violated_at(vc, pt, cfg.exp_budget, &w, &detail))
              return Verdict::refuted(Counterexample{vc.id, pt, w, detail});
          }
        }
      }
    }
    for (const auto& d : vc.hypothesis.disjuncts) {
      if (conjunct_unsatisfiable(d)) continue;
      auto cert = prove_on_set(target, constraints_of(d), strict, vc.excluded_origin, vc.vars, cfg.sos);
      if (!cert) {
        proved = false;
        break;
      }
      certs.push_back(*cert);
    }
  }
  if (proved) return Verdict::proved(std::move(certs));

  FalsifyOptions fo = cfg.falsify;
  fo.exp_budget = cfg.exp_budget;
  if (auto cx = falsify(vc, fo)) return Verdict::refuted(*cx);
  return Verdict::inconclusive("no certificate found; falsification found no violation within budget " +
                               std::to_string(cfg.falsify.budget));
}

}  // namespace swcert
