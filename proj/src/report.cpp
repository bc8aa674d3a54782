#include "swcert/report.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "swcert/invariance.hpp"
#include "swcert/parser.hpp"

namespace swcert {

using nlohmann::ordered_json;

const char* overall_text(OverallStatus s) {
  switch (s) {
    case OverallStatus::Proved: return "Proved";
    case OverallStatus::RefutedPremise: return "Refuted-Premise";
    case OverallStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

CheckerConfig RunConfig::checker() const {
  CheckerConfig c;
  c.sos.multiplier_degree = sos_degree;
  c.falsify.budget = falsify_budget;
  c.falsify.seed = seed;
  c.exp_budget = exp_terms;
  c.exp_budget_cap = std::max(exp_terms * 4, 120u);
  return c;
}

std::string select_rule(const SwitchedModel& m, const LyapunovAssignment& A) {
  switch (m.kind) {
    case SwitchKind::Arbitrary:
      return "clf";
    case SwitchKind::StateDependent:
      if (A.covers(m) && A.is_common()) return m.region ? "clf-restricted" : "clf";
      return "mlf-state";
    case SwitchKind::Guarded:
      return "mlf-guarded";
    case SwitchKind::Timed:
      return "mlf-timed";
    case SwitchKind::Controlled:
      return "ctrl-unfold";
  }
  return "mlf-state";
}

std::vector<VerificationCondition> generate_vcs(const SwitchedModel& m, const LyapunovAssignment& A,
                                                const std::string& rule) {
  auto common = [&]() -> Poly {
    if (!A.covers(m) || A.V.empty()) throw VcGenError("rule needs a Lyapunov candidate for every mode");
    if (!A.is_common()) throw VcGenError("common-function rule needs one shared candidate");
    return A.V.begin()->second;
  };
  if (rule == "clf") return gen_clf(m, common());
  if (rule == "clf-restricted") {
    Predicate region = m.region.value_or(Predicate::top());
    return gen_restricted_attractivity(m, common(), region);
  }
  if (rule == "mlf-state") return gen_mlf_state(m, A);
  if (rule == "mlf-guarded") return gen_mlf_guarded(m, A);
  if (rule == "mlf-timed") return gen_mlf_timed(m, A);
  if (rule == "ctrl-unfold") return gen_controlled_unfold(m, A);
  throw VcGenError("unknown rule " + rule);
}

Report run_verify(const SwitchedModel& m, const LyapunovAssignment& A, const RunConfig& cfg) {
  Report rep;
  rep.model_name = m.name;
  rep.model_hash = model_hash(m);
  rep.kind = m.kind;
  rep.rule = cfg.rule.empty() ? select_rule(m, A) : cfg.rule;
  rep.seed = cfg.seed;

  std::vector<VerificationCondition> vcs = generate_vcs(m, A, rep.rule);
  CheckerConfig chk = cfg.checker();

  auto check_one = [&](const VerificationCondition& vc) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v = vc.marker == VerificationCondition::Marker::SetInvariance
                    ? check_set_invariance(m, vc.inv_mode, vc.inv_poly, vc.inv_sense, chk)
                    : check_vc(vc, chk);
    auto t1 = std::chrono::steady_clock::now();
    VcResult r;
    r.vc = vc;
    r.verdict = std::move(v);
    r.millis = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    return r;
  };

  rep.results.resize(vcs.size());
  if (cfg.jobs > 1) {
    std::vector<std::future<VcResult>> futs;
    futs.reserve(vcs.size());
    for (const auto& vc : vcs)
      futs.push_back(std::async(std::launch::async, [&, vc]() { return check_one(vc); }));
    for (std::size_t i = 0; i < futs.size(); ++i) rep.results[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < vcs.size(); ++i) rep.results[i] = check_one(vcs[i]);
  }

  bool any_refuted = false, all_proved = true;
  for (const auto& r : rep.results) {
    if (r.verdict.is_refuted()) any_refuted = true;
    if (!r.verdict.is_proved()) all_proved = false;
  }
  rep.overall = all_proved  ? OverallStatus::Proved
                : any_refuted ? OverallStatus::RefutedPremise
                              : OverallStatus::Inconclusive;
  return rep;
}

ordered_json vc_to_json(const VerificationCondition& vc) {
  ordered_json j;
  j["id"] = vc.id;
  ordered_json origin;
  origin["rule"] = vc.origin.rule;
  origin["premise"] = vc.origin.premise;
  origin["modes"] = vc.origin.modes;
  j["origin"] = std::move(origin);
  j["vars"] = vc.vars;
  // Hypothesis as a DNF tree: list of conjuncts, each a list of atoms.
  ordered_json hyp = ordered_json::array();
  for (const auto& d : vc.hypothesis.disjuncts) {
    ordered_json conj = ordered_json::array();
    for (const auto& a : d) {
      ordered_json atom;
      atom["poly"] = poly_to_json(a.poly);
      atom["cmp"] = cmp_text(a.cmp);
      conj.push_back(std::move(atom));
    }
    hyp.push_back(std::move(conj));
  }
  j["hypothesis"] = std::move(hyp);
  ordered_json concl;
  concl["poly"] = poly_to_json(vc.plain_conclusion_part());
  concl["cmp"] = cmp_text(vc.cmp);
  concl["strict"] = vc.strict();
  ordered_json expt = ordered_json::array();
  for (const auto& t : vc.conclusion) {
    if (t.exponent.is_zero()) continue;
    ordered_json te;
    te["poly"] = poly_to_json(t.poly);
    te["exponent"] = t.exponent.str();
    expt.push_back(std::move(te));
  }
  j["conclusion"] = std::move(concl);
  j["conclusion"]["exp_terms"] = std::move(expt);
  j["excluded_origin"] = vc.excluded_origin;
  if (vc.marker == VerificationCondition::Marker::Radial) j["marker"] = "radial-unbounded";
  if (vc.marker == VerificationCondition::Marker::SetInvariance) {
    j["marker"] = "set-invariance";
    j["inv_mode"] = vc.inv_mode;
    j["inv_poly"] = poly_to_json(vc.inv_poly);
    j["inv_sense"] = cmp_text(vc.inv_sense);
  }
  return j;
}

namespace {

Cmp cmp_from_text(const std::string& s) {
  if (s == "<") return Cmp::Lt;
  if (s == "<=") return Cmp::Le;
  if (s == "=") return Cmp::Eq;
  if (s == ">=") return Cmp::Ge;
  if (s == ">") return Cmp::Gt;
  throw std::invalid_argument("unknown comparison " + s);
}

}  // namespace

VerificationCondition vc_from_json(const ordered_json& j) {
  VerificationCondition vc;
  vc.id = j.at("id").get<std::string>();
  vc.origin.rule = j.at("origin").at("rule").get<std::string>();
  vc.origin.premise = j.at("origin").at("premise").get<std::string>();
  vc.origin.modes = j.at("origin").at("modes").get<std::vector<std::string>>();
  vc.vars = j.at("vars").get<std::vector<std::string>>();
  for (const auto& conj : j.at("hypothesis")) {
    Conjunct c;
    for (const auto& atom : conj)
      c.push_back(Atom{poly_from_json(atom.at("poly")), cmp_from_text(atom.at("cmp").get<std::string>())});
    vc.hypothesis.disjuncts.push_back(std::move(c));
  }
  if (vc.hypothesis.disjuncts.empty()) vc.hypothesis = Predicate::bottom();
  const auto& concl = j.at("conclusion");
  vc.cmp = cmp_from_text(concl.at("cmp").get<std::string>());
  vc.conclusion.push_back(ExpTerm{poly_from_json(concl.at("poly")), Rational(0)});
  for (const auto& te : concl.at("exp_terms"))
    vc.conclusion.push_back(
        ExpTerm{poly_from_json(te.at("poly")), Rational::parse(te.at("exponent").get<std::string>())});
  vc.excluded_origin = j.at("excluded_origin").get<bool>();
  if (j.contains("marker")) {
    const std::string mk = j.at("marker").get<std::string>();
    if (mk == "radial-unbounded") vc.marker = VerificationCondition::Marker::Radial;
    if (mk == "set-invariance") {
      vc.marker = VerificationCondition::Marker::SetInvariance;
      vc.inv_mode = j.at("inv_mode").get<std::string>();
      vc.inv_poly = poly_from_json(j.at("inv_poly"));
      vc.inv_sense = cmp_from_text(j.at("inv_sense").get<std::string>());
    }
  }
  return vc;
}

ordered_json report_to_json(const Report& r, bool normalize_timings) {
  ordered_json j;
  j["version"] = r.version;
  ordered_json model;
  model["name"] = r.model_name;
  model["hash"] = r.model_hash;
  model["kind"] = switch_kind_text(r.kind);
  j["model"] = std::move(model);
  j["rule"] = r.rule;
  ordered_json vcs = ordered_json::array();
  for (const auto& res : r.results) {
    ordered_json e;
    e["id"] = res.vc.id;
    ordered_json origin;
    origin["rule"] = res.vc.origin.rule;
    origin["premise"] = res.vc.origin.premise;
    origin["modes"] = res.vc.origin.modes;
    e["origin"] = std::move(origin);
    e["vc"] = vc_to_json(res.vc);
    switch (res.verdict.status) {
      case VerdictStatus::Proved: e["verdict"] = "Proved"; break;
      case VerdictStatus::Refuted: e["verdict"] = "Refuted"; break;
      case VerdictStatus::Inconclusive: e["verdict"] = "Inconclusive"; break;
    }
    if (!res.verdict.certificates.empty()) {
      ordered_json certs = ordered_json::array();
      for (const auto& c : res.verdict.certificates) certs.push_back(certificate_to_json(c));
      e["certificate"] = std::move(certs);
    }
    if (res.verdict.counterexample)
      e["counterexample"] = counterexample_to_json(*res.verdict.counterexample);
    if (!res.verdict.reason.empty()) e["reason"] = res.verdict.reason;
    e["millis"] = normalize_timings ? 0 : res.millis;
    vcs.push_back(std::move(e));
  }
  j["vcs"] = std::move(vcs);
  j["overall"] = overall_text(r.overall);
  j["seed"] = r.seed;
  return j;
}

namespace {

// Strips strictness: both read as claims `poly cmp 0` whose certified target
// must be reproduced by the certificate replay.
std::vector<std::pair<Poly, bool>> normalized_targets_of(const VerificationCondition& vc) {
  Poly c = vc.plain_conclusion_part();
  switch (vc.cmp) {
    case Cmp::Ge: return {{c, false}};
    case Cmp::Gt: return {{c, true}};
    case Cmp::Le: return {{-c, false}};
    case Cmp::Lt: return {{-c, true}};
    case Cmp::Eq: return {{c, false}, {-c, false}};
  }
  return {};
}

bool replay_one(const ordered_json& entry, std::string* why) {
  const std::string verdict = entry.at("verdict").get<std::string>();
  VerificationCondition vc = vc_from_json(entry.at("vc"));
  auto fail = [&](const std::string& msg) {
    if (why) *why = "vc " + vc.id + ": " + msg;
    return false;
  };

  if (verdict == "Refuted") {
    if (!entry.contains("counterexample")) return fail("refuted without counterexample");
    Counterexample cx = counterexample_from_json(entry.at("counterexample"));
    for (const auto& [k, v] : cx.point)
      if (std::find(vc.vars.begin(), vc.vars.end(), k) == vc.vars.end() && !v.is_zero())
        return fail("counterexample binds foreign variable " + k);
    bool origin_case = true;
    for (const auto& [k, v] : cx.point)
      if (!v.is_zero()) origin_case = false;
    if (vc.excluded_origin && origin_case) {
      // Origin-equality violation: conclusion must be nonzero at the origin.
      Rational at0(0);
      for (const auto& t : vc.conclusion) at0 += evaluate(t.poly, cx.point);
      if (at0.is_zero()) return fail("claimed origin violation but the conclusion vanishes there");
      return true;
    }
    if (!vc.hypothesis.holds_at(cx.point) && !vc.hypothesis.is_true())
      return fail("counterexample does not satisfy the hypothesis");
    if (!conclusion_violated_at(vc, cx.point, 60)) return fail("counterexample does not violate the conclusion");
    return true;
  }

  if (verdict != "Proved") return true;  // nothing to replay for Inconclusive
  if (!entry.contains("certificate")) return fail("proved without certificate");

  for (const auto& cj : entry.at("certificate")) {
    Certificate c = certificate_from_json(cj);
    std::string err;
    auto replayed = replay_certificate(c, &err);
    if (!replayed) return fail("certificate replay failed: " + err);
    // Binding: the certified polynomial must match one of the claim targets
    // (set-invariance and radial markers bind to model-derived polynomials,
    // where the identity and definiteness replay is the load-bearing part).
    if (vc.marker == VerificationCondition::Marker::None && !vc.has_exp() &&
        c.kind == Certificate::Kind::Sos && !replayed->is_zero()) {
      bool matches = false;
      for (const auto& [target, strict] : normalized_targets_of(vc))
        if (*replayed == target.aligned_to(replayed->vars())) matches = true;
      if (!matches) return fail("certificate target does not match the condition");
    }
  }
  return true;
}

}  // namespace

bool replay_report(const ordered_json& report_json, std::string* why) {
  if (!report_json.contains("vcs")) {
    if (why) *why = "no vcs array";
    return false;
  }
  bool any_refuted = false, all_proved = true;
  for (const auto& entry : report_json.at("vcs")) {
    if (!replay_one(entry, why)) return false;
    const std::string v = entry.at("verdict").get<std::string>();
    if (v == "Refuted") any_refuted = true;
    if (v != "Proved") all_proved = false;
  }
  const std::string overall = report_json.at("overall").get<std::string>();
  std::string expect = all_proved ? "Proved" : any_refuted ? "Refuted-Premise" : "Inconclusive";
  if (overall != expect) {
    if (why) *why = "overall status " + overall + " inconsistent with verdicts (" + expect + ")";
    return false;
  }
  return true;
}

std::string BenchResult::table() const {
  std::ostringstream os;
  os << "fixture                        expected           got                time    status\n";
  for (const auto& e : entries) {
    os.width(30);
    os << std::left << e.fixture;
    os.width(19);
    os << std::left << e.expected;
    os.width(19);
    os << std::left << e.got;
    std::ostringstream t;
    t << e.millis << "ms";
    os.width(8);
    os << std::left << t.str();
    os << (e.pass ? "ok" : "MISMATCH") << "\n";
  }
  return os.str();
}

ordered_json BenchResult::json() const {
  ordered_json j = ordered_json::array();
  for (const auto& e : entries) {
    ordered_json je;
    je["fixture"] = e.fixture;
    je["expected"] = e.expected;
    je["got"] = e.got;
    je["pass"] = e.pass;
    je["millis"] = e.millis;
    j.push_back(std::move(je));
  }
  return j;
}

BenchResult run_bench(const std::string& corpus_dir, const RunConfig& cfg) {
  namespace fs = std::filesystem;
  BenchResult out;
  std::vector<fs::path> fixtures;
  for (const auto& e : fs::directory_iterator(corpus_dir))
    if (e.path().extension() == ".ssm") fixtures.push_back(e.path());
  std::sort(fixtures.begin(), fixtures.end());
  if (fixtures.empty()) throw std::runtime_error("bench: no .ssm fixtures in " + corpus_dir);

  for (const auto& path : fixtures) {
    fs::path sidecar = path;
    sidecar.replace_extension(".expect.json");
    if (!fs::exists(sidecar)) throw std::runtime_error("bench: missing sidecar " + sidecar.string());
    std::ifstream in(sidecar);
    ordered_json exp = ordered_json::parse(in);
    BenchEntry entry;
    entry.fixture = path.filename().string();
    entry.expected = exp.at("overall").get<std::string>();

    std::ifstream mf(path);
    std::stringstream buf;
    buf << mf.rdbuf();
    ParseResult pr = parse_model(buf.str());
    auto t0 = std::chrono::steady_clock::now();
    if (!pr.ok()) {
      entry.got = "ParseError";
    } else {
      RunConfig rc = cfg;
      if (exp.contains("rule")) rc.rule = exp.at("rule").get<std::string>();
      Report rep = run_verify(*pr.model, LyapunovAssignment::from_model(*pr.model), rc);
      entry.got = overall_text(rep.overall);
    }
    auto t1 = std::chrono::steady_clock::now();
    entry.millis = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    entry.pass = entry.expected == "NotRefuted" ? entry.got != "Refuted-Premise" : entry.got == entry.expected;
    if (!entry.pass) out.all_pass = false;
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace swcert
