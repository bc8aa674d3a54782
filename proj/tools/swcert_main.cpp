// Command-line driver: model checking, verification-condition generation and
// checking, candidate synthesis, falsification, simulation, probing,
// rendering and the fixture benchmark.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "swcert/falsify.hpp"
#include "swcert/invariance.hpp"
#include "swcert/parser.hpp"
#include "swcert/report.hpp"
#include "swcert/sim.hpp"
#include "swcert/synth.hpp"

namespace {

using namespace swcert;

constexpr int kExitProved = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << content;
  }
  std::filesystem::rename(tmp, p);
}

SwitchedModel load_model(const std::string& path, const RunConfig& cfg) {
  ParseResult r = parse_model(slurp(path));
  if (!r.ok()) throw std::runtime_error("model error:\n" + r.diagnostics.str());
  SwitchedModel m = *r.model;
  if (cfg.region_override) m.region = parse_predicate(*cfg.region_override, m.var_universe());
  return m;
}

std::vector<double> parse_point(const std::string& text, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  out.resize(n, 0.0);
  return out;
}

int cmd_check(const std::string& model_path) {
  ParseResult r = parse_model(slurp(model_path));
  if (!r.model) {
    std::cout << r.diagnostics.str();
    return kExitUsage;
  }
  Diagnostics d = well_formed(*r.model);
  std::cout << d.str();
  if (d.ok())
    std::cout << "ok: " << r.model->name << " (" << switch_kind_text(r.model->kind) << ", "
              << r.model->modes.size() << " modes, " << r.model->transitions.size() << " transitions)\n";
  return d.ok() ? kExitProved : kExitUsage;
}

int cmd_verify(const std::string& model_path, RunConfig cfg, const std::string& out_dir,
               const std::string& candidates_from, bool synthesize) {
  SwitchedModel m = load_model(model_path, cfg);
  Diagnostics d = well_formed(m);
  if (!d.ok()) {
    std::cerr << d.str();
    return kExitUsage;
  }
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  if (!candidates_from.empty()) {
    ParseResult donor = parse_model(slurp(candidates_from));
    if (!donor.ok()) {
      std::cerr << "candidate file error:\n" << donor.diagnostics.str();
      return kExitUsage;
    }
    A = LyapunovAssignment::from_model(*donor.model);
  }
  if (!A.covers(m) && synthesize) {
    SynthOptions sopt;
    if (auto multi = synth_multiple(m, sopt)) {
      A.V = multi->V;
    } else if (auto common = synth_common_quadratic(m, sopt)) {
      A = LyapunovAssignment::common(m, *common);
    }
  }
  if (!A.covers(m)) {
    std::cerr << "no Lyapunov candidate for every mode (annotate, pass --candidates-from, or --synthesize)\n";
    return kExitUsage;
  }

  Report rep = run_verify(m, A, cfg);
  nlohmann::ordered_json j = report_to_json(rep, cfg.normalize_timings);
  std::string payload = j.dump(2) + "\n";
  if (!out_dir.empty()) {
    std::filesystem::path base(out_dir);
    spit((base / (m.name + ".report.json")).string(), payload);
  }
  for (const auto& res : rep.results) {
    const char* v = res.verdict.is_proved()    ? "Proved"
                    : res.verdict.is_refuted() ? "Refuted"
                                               : "Inconclusive";
    std::cout << res.vc.id << ": " << v;
    if (!res.verdict.reason.empty()) std::cout << " (" << res.verdict.reason << ")";
    std::cout << "\n";
  }
  std::cout << "overall: " << overall_text(rep.overall) << "\n";
  if (out_dir.empty()) std::cout << payload;
  switch (rep.overall) {
    case OverallStatus::Proved: return kExitProved;
    case OverallStatus::RefutedPremise: return kExitRefuted;
    case OverallStatus::Inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

int cmd_replay(const std::string& report_path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(slurp(report_path));
  std::string why;
  if (replay_report(j, &why)) {
    std::cout << "replay ok: every certificate and counterexample re-verified exactly\n";
    return kExitProved;
  }
  std::cout << "replay FAILED: " << why << "\n";
  return kExitRefuted;
}

int cmd_synth(const std::string& model_path, RunConfig cfg, const std::string& out_path) {
  SwitchedModel m = load_model(model_path, cfg);
  SynthOptions sopt;
  std::optional<LyapunovAssignment> A;
  if (auto multi = synth_multiple(m, sopt)) {
    A = multi;
  } else if (auto common = synth_common_quadratic(m, sopt)) {
    A = LyapunovAssignment::common(m, *common);
  }
  if (!A) {
    std::cout << "synthesis failed: no candidate found\n";
    return kExitInconclusive;
  }
  SwitchedModel annotated = m;
  annotated.lyapunov = A->V;
  std::string text = pretty_print(annotated);
  if (out_path.empty())
    std::cout << text;
  else
    spit(out_path, text);
  for (const auto& [mode, V] : A->V) std::cout << "lyapunov " << mode << " : " << V.str() << ";\n";
  return kExitProved;
}

int cmd_falsify(const std::string& model_path, RunConfig cfg, const std::string& vc_filter) {
  SwitchedModel m = load_model(model_path, cfg);
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  std::string rule = cfg.rule.empty() ? select_rule(m, A) : cfg.rule;
  auto vcs = generate_vcs(m, A, rule);
  FalsifyOptions fo;
  fo.budget = cfg.falsify_budget;
  fo.seed = cfg.seed;
  fo.exp_budget = cfg.exp_terms;
  bool matched = false;
  for (const auto& vc : vcs) {
    if (!vc_filter.empty() && vc.id.find(vc_filter) == std::string::npos) continue;
    matched = true;
    if (auto cx = falsify(vc, fo)) {
      std::cout << counterexample_to_json(*cx).dump(2) << "\n";
      return kExitRefuted;
    }
  }
  if (!matched) {
    std::cerr << "no condition matches filter '" << vc_filter << "'\n";
    return kExitUsage;
  }
  std::cout << "no violation found within budget " << fo.budget << "\n";
  return kExitInconclusive;
}

int cmd_simulate(const std::string& model_path, RunConfig cfg, const std::string& x0_text, double horizon,
                 double dt, const std::string& out_dir) {
  SwitchedModel m = load_model(model_path, cfg);
  SimOptions so;
  so.horizon = horizon;
  so.dt = dt;
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  SwitchingPolicy pol = (m.kind == SwitchKind::Guarded || m.kind == SwitchKind::Timed ||
                         m.kind == SwitchKind::Controlled)
                            ? SwitchingPolicy::guard_driven(cfg.seed)
                            : SwitchingPolicy::random_dwell(cfg.seed);
  std::vector<double> x0 = parse_point(x0_text, m.continuous_vars().size());
  Trace tr = simulate(m, x0, pol, so, A.V.empty() ? nullptr : &A);
  if (out_dir.empty()) {
    std::cout << tr.csv();
  } else {
    std::filesystem::path base(out_dir);
    spit((base / (m.name + ".trace.csv")).string(), tr.csv());
    spit((base / (m.name + ".events.json")).string(), tr.events_json() + "\n");
    std::cout << "wrote " << (base / (m.name + ".trace.csv")).string() << "\n";
  }
  return kExitProved;
}

int cmd_probe(const std::string& model_path, RunConfig cfg, const std::string& eps_text, double delta,
              int samples, double horizon, bool attractivity, const std::string& out_dir) {
  SwitchedModel m = load_model(model_path, cfg);
  SimOptions so;
  so.horizon = horizon;
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  const LyapunovAssignment* Ap = A.V.empty() ? nullptr : &A;
  ProbeReport rep;
  if (attractivity) {
    double eps = eps_text.empty() ? 0.1 : std::stod(eps_text);
    const Predicate* region = m.region ? &*m.region : nullptr;
    rep = probe_attractivity(m, delta, eps, samples, cfg.seed, so, region, Ap);
  } else {
    std::vector<double> eps_list;
    std::stringstream ss(eps_text.empty() ? std::string("0.3") : eps_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) eps_list.push_back(std::stod(tok));
    rep = probe_stability(m, eps_list, samples, cfg.seed, so, Ap);
  }
  std::string payload = rep.json() + "\n";
  if (!out_dir.empty())
    spit((std::filesystem::path(out_dir) / (m.name + ".probe.json")).string(), payload);
  std::cout << payload;
  bool violations = rep.attr_violations > 0;
  for (const auto& e : rep.stability) violations = violations || e.violations > 0 || e.delta == 0;
  return violations ? kExitRefuted : kExitProved;
}

int cmd_render(const std::string& model_path, const RunConfig& cfg, const std::string& out_path) {
  SwitchedModel m = load_model(model_path, cfg);
  std::string dot = emit_dot(m);
  if (out_path.empty())
    std::cout << dot;
  else
    spit(out_path, dot);
  return kExitProved;
}

int cmd_bench(const std::string& corpus_dir, const RunConfig& cfg, const std::string& out_dir) {
  BenchResult res = run_bench(corpus_dir, cfg);
  std::cout << res.table();
  if (!out_dir.empty())
    spit((std::filesystem::path(out_dir) / "bench.json").string(), res.json().dump(2) + "\n");
  return res.all_pass ? kExitProved : kExitRefuted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"switched-system stability certificates: generate, check, refute, simulate"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string model_path, out_dir, out_path, rule, region, vc_filter, candidates_from, replay_path;
  std::string x0_text = "1", eps_text;
  double horizon = 20.0, dt = 1e-3, delta = 1.0;
  int samples = 200;
  bool synthesize = false, attractivity = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--rule", rule, "override the proof-rule selection");
    sub->add_option("--seed", cfg.seed, "deterministic seed");
    sub->add_option("--sos-degree", cfg.sos_degree, "S-procedure multiplier degree (default 2, cap 4)");
    sub->add_option("--falsify-budget", cfg.falsify_budget, "counterexample sampling budget");
    sub->add_option("--exp-terms", cfg.exp_terms, "Taylor terms for exponential enclosures");
    sub->add_option("--region", region, "restricted pre-attractivity region predicate");
    sub->add_option("--out", out_dir, "output directory for artifacts");
    sub->add_flag("--normalize-timings", cfg.normalize_timings, "zero out timings in reports");
    sub->add_option("--jobs", cfg.jobs, "parallel condition checks");
  };

  CLI::App* check = app.add_subcommand("check", "parse and well-formedness diagnostics");
  check->add_option("model", model_path)->required();

  CLI::App* verify = app.add_subcommand("verify", "generate and check all proof-rule conditions");
  verify->add_option("model", model_path);
  add_common(verify);
  verify->add_option("--candidates-from", candidates_from, "read lyapunov annotations from another model");
  verify->add_flag("--synthesize", synthesize, "synthesize candidates when annotations are missing");
  verify->add_option("--replay", replay_path, "re-verify an existing report instead of running");

  CLI::App* synth = app.add_subcommand("synth", "synthesize Lyapunov candidates as annotations");
  synth->add_option("model", model_path)->required();
  add_common(synth);
  synth->add_option("--annotated-out", out_path, "write the annotated model here");

  CLI::App* fals = app.add_subcommand("falsify", "hunt a counterexample for a named condition");
  fals->add_option("model", model_path)->required();
  add_common(fals);
  fals->add_option("--vc", vc_filter, "condition id substring filter");

  CLI::App* sim = app.add_subcommand("simulate", "integrate one switching execution (CSV + events)");
  sim->add_option("model", model_path)->required();
  add_common(sim);
  sim->add_option("--x0", x0_text, "initial state, comma separated");
  sim->add_option("--horizon", horizon, "time horizon");
  sim->add_option("--dt", dt, "integration step");

  CLI::App* probe = app.add_subcommand("probe", "empirical stability / pre-attractivity measurements");
  probe->add_option("model", model_path)->required();
  add_common(probe);
  probe->add_option("--eps", eps_text, "epsilon (list for stability)");
  probe->add_option("--delta", delta, "initial-ball radius (attractivity)");
  probe->add_option("--samples", samples, "sampled executions per setting");
  probe->add_option("--horizon", horizon, "time horizon");
  probe->add_flag("--attractivity", attractivity, "probe pre-attractivity instead of stability");

  CLI::App* render = app.add_subcommand("render", "emit the Graphviz automaton view");
  render->add_option("model", model_path)->required();
  render->add_option("--dot-out", out_path, "write DOT here (stdout otherwise)");

  CLI::App* bench = app.add_subcommand("bench", "run the fixture corpus against expectations");
  bench->add_option("corpus", model_path)->required();
  add_common(bench);

  CLI11_PARSE(app, argc, argv);
  cfg.rule = rule;
  if (!region.empty()) cfg.region_override = region;

  try {
    if (app.got_subcommand(check)) return cmd_check(model_path);
    if (app.got_subcommand(verify)) {
      if (!replay_path.empty()) return cmd_replay(replay_path);
      if (model_path.empty()) {
        std::cerr << "verify: model path required (or --replay)\n";
        return kExitUsage;
      }
      return cmd_verify(model_path, cfg, out_dir, candidates_from, synthesize);
    }
    if (app.got_subcommand(synth)) return cmd_synth(model_path, cfg, out_path);
    if (app.got_subcommand(fals)) return cmd_falsify(model_path, cfg, vc_filter);
    if (app.got_subcommand(sim)) return cmd_simulate(model_path, cfg, x0_text, horizon, dt, out_dir);
    if (app.got_subcommand(probe))
      return cmd_probe(model_path, cfg, eps_text, delta, samples, horizon, attractivity, out_dir);
    if (app.got_subcommand(render)) return cmd_render(model_path, cfg, out_path);
    if (app.got_subcommand(bench)) return cmd_bench(model_path, cfg, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
