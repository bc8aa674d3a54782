#include "swcert/invariance.hpp"

namespace swcert {

Verdict check_set_invariance(const SwitchedModel& m, const std::string& mode_id, const Poly& p,
                             Cmp sense, const CheckerConfig& cfg) {
  if (sense != Cmp::Ge && sense != Cmp::Gt)
    return Verdict::inconclusive("only invariance of p >= 0 / p > 0 is supported");
  const Mode* mode = m.find_mode(mode_id);
  if (!mode) throw std::invalid_argument("check_set_invariance: unknown mode " + mode_id);

  const std::vector<std::string> vars = m.var_universe();
  Poly lie = lie_derivative(p.aligned_to(vars), mode->field);

  // Exact Darboux identities first: Lie(p) = 0 (cofactor 0) or Lie(p) = g p.
  if (lie.is_zero()) {
    SosCertificate cert;
    cert.vars = vars;
    cert.target = lie.aligned_to(vars);
    cert.eps = Rational(0);
    Certificate c;
    c.kind = Certificate::Kind::Sos;
    c.sos = std::move(cert);
    return Verdict::proved({c});
  }
  if (auto g = exact_divide(lie, p.aligned_to(vars))) {
    // Lie(p) - g p = 0: the cofactor rides in the multiplier slot and the
    // identity replays as lie == g * p with an empty square part.
    SosCertificate cert;
    cert.vars = vars;
    cert.target = lie;
    cert.eps = Rational(0);
    cert.eqs.push_back(EqMultiplier{p.aligned_to(vars), *g});
    Certificate c;
    c.kind = Certificate::Kind::Sos;
    c.sos = std::move(cert);
    return Verdict::proved({c});
  }

  // Darboux with a searched cofactor: Lie(p) - g p nonnegative on the domain
  // closure. The cofactor is a free multiplier on p, exactly like an equality
  // multiplier, so the certificate identity is
  //   Lie(p) = SOS(domain) + g p.
  Predicate domc = mode->domain.closure();
  {
    bool all = true;
    std::vector<Certificate> certs;
    for (const auto& d : domc.disjuncts) {
      if (conjunct_unsatisfiable(d)) continue;
      ConstraintSystem sys = constraints_of(d);
      sys.equalities.push_back(p.aligned_to(vars));
      auto cert =
          find_sos_certificate(lie, sys.inequalities, sys.equalities, false, false, vars, cfg.sos);
      if (!cert) {
        all = false;
        break;
      }
      certs.push_back(*cert);
    }
    if (all && !certs.empty()) return Verdict::proved(std::move(certs));
  }

  // Barrier: Lie(p) > 0 on the domain closure intersected with p = 0.
  {
    bool all = true;
    std::vector<Certificate> certs;
    for (const auto& d : domc.disjuncts) {
      if (conjunct_unsatisfiable(d)) continue;
      ConstraintSystem sys = constraints_of(d);
      sys.equalities.push_back(p.aligned_to(vars));
      auto cert = prove_on_set(lie, sys, true, false, vars, cfg.sos);
      if (!cert) {
        all = false;
        break;
      }
      certs.push_back(*cert);
    }
    if (all && !certs.empty()) return Verdict::proved(std::move(certs));
  }

  return Verdict::inconclusive("neither a Darboux cofactor nor a barrier condition was found");
}

}  // namespace swcert
