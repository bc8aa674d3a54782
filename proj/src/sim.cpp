#include "swcert/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "swcert/program_ir.hpp"

namespace swcert {

SwitchingPolicy SwitchingPolicy::random_dwell(std::uint64_t seed) { return {PolicyKind::RandomDwell, seed, {}}; }
SwitchingPolicy SwitchingPolicy::guard_driven(std::uint64_t seed) { return {PolicyKind::GuardDriven, seed, {}}; }
SwitchingPolicy SwitchingPolicy::scripted(std::vector<std::pair<double, std::string>> schedule) {
  return {PolicyKind::Scripted, 0, std::move(schedule)};
}
SwitchingPolicy SwitchingPolicy::greedy_growth() { return {PolicyKind::GreedyGrowth, 0, {}}; }

namespace {

// Compiled right-hand sides: coefficient/exponent pairs per variable.
struct CompiledPoly {
  struct Term {
    double c;
    std::vector<unsigned> exps;
  };
  std::vector<Term> terms;

  double eval(const std::vector<double>& x) const {
    double acc = 0;
    for (const auto& t : terms) {
      double v = t.c;
      for (std::size_t i = 0; i < t.exps.size(); ++i)
        for (unsigned k = 0; k < t.exps[i]; ++k) v *= x[i];
      acc += v;
    }
    return acc;
  }
};

CompiledPoly compile_poly(const Poly& p, const std::vector<std::string>& vars) {
  CompiledPoly out;
  Poly a = p.aligned_to(merge_vars(p.vars(), vars)).aligned_to(vars);
  for (const auto& [m, c] : a.terms()) out.terms.push_back({c.to_double(), m.exps});
  return out;
}

struct CompiledMode {
  std::string id;
  std::vector<CompiledPoly> rhs;  // one per continuous variable (tau excluded)
  const Mode* mode = nullptr;
  double max_dwell = std::numeric_limits<double>::infinity();
};

struct CompiledModel {
  const SwitchedModel* m;
  std::vector<std::string> vars;  // continuous variables, state first
  std::size_t n_state;
  bool timed;
  std::vector<CompiledMode> modes;
  std::vector<CompiledPoly> v_polys;  // aligned with v_modes
  std::vector<std::string> v_modes;

  int mode_index(const std::string& id) const {
    for (std::size_t i = 0; i < modes.size(); ++i)
      if (modes[i].id == id) return static_cast<int>(i);
    return -1;
  }
};

CompiledModel compile_model(const SwitchedModel& m, const LyapunovAssignment* A) {
  CompiledModel cm;
  cm.m = &m;
  cm.vars = m.continuous_vars();
  cm.n_state = m.state_vars.size();
  cm.timed = m.kind == SwitchKind::Timed;
  for (const auto& md : m.modes) {
    CompiledMode c;
    c.id = md.id;
    c.mode = &md;
    if (md.max_dwell) c.max_dwell = md.max_dwell->to_double();
    for (const auto& v : cm.vars) {
      auto it = md.field.rhs.find(v);
      c.rhs.push_back(it == md.field.rhs.end() ? CompiledPoly{} : compile_poly(it->second, cm.vars));
    }
    cm.modes.push_back(std::move(c));
  }
  if (A) {
    for (const auto& [mode, V] : A->V) {
      cm.v_modes.push_back(mode);
      cm.v_polys.push_back(compile_poly(V, cm.vars));
    }
  }
  return cm;
}

bool domain_holds(const CompiledModel& cm, const CompiledMode& md, const std::vector<double>& x,
                  double tau, double tol) {
  if (cm.timed && tau > md.max_dwell + tol) return false;
  if (md.mode->domain.is_true()) return true;
  return md.mode->domain.holds_at_double(cm.vars, x, tol);
}

void rk4_step(const CompiledMode& md, std::vector<double>& x, double h) {
  const std::size_t n = x.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) k1[i] = md.rhs[i].eval(x);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  for (std::size_t i = 0; i < n; ++i) k2[i] = md.rhs[i].eval(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  for (std::size_t i = 0; i < n; ++i) k3[i] = md.rhs[i].eval(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  for (std::size_t i = 0; i < n; ++i) k4[i] = md.rhs[i].eval(tmp);
  for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double exp1() { return -std::log(1.0 - unit()); }
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(gen() % n); }
};

}  // namespace

double Trace::state_norm(std::size_t sample, std::size_t n_state) const {
  double acc = 0;
  for (std::size_t i = 0; i < n_state && i < states[sample].size(); ++i)
    acc += states[sample][i] * states[sample][i];
  return std::sqrt(acc);
}

std::string Trace::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,mode";
  for (const auto& v : vars) os << "," << v;
  os << ",tau";
  for (const auto& m : v_modes) os << ",V_" << m;
  os << "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << times[i] << "," << modes[i];
    for (double x : states[i]) os << "," << x;
    os << "," << tau[i];
    if (!v_values.empty())
      for (double v : v_values[i]) os << "," << v;
    os << "\n";
  }
  return os.str();
}

std::string Trace::events_json() const {
  nlohmann::ordered_json j;
  j["stuck"] = stuck;
  j["end_time"] = end_time;
  nlohmann::ordered_json evs = nlohmann::ordered_json::array();
  for (const auto& e : events) {
    nlohmann::ordered_json je;
    je["t"] = e.t;
    je["from"] = e.from;
    je["to"] = e.to;
    je["reason"] = e.reason;
    evs.push_back(std::move(je));
  }
  j["events"] = std::move(evs);
  return j.dump(2);
}

Trace simulate(const SwitchedModel& m, const std::vector<double>& x0, const SwitchingPolicy& policy,
               const SimOptions& opt, const LyapunovAssignment* A) {
  CompiledModel cm = compile_model(m, A);
  const std::size_t n = cm.vars.size();

  Trace tr;
  tr.vars = cm.vars;
  tr.v_modes = cm.v_modes;

  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < std::min(x0.size(), n); ++i) x[i] = x0[i];
  double t = 0.0, tau = 0.0;
  Rng rng(policy.seed);

  // Initial mode: scripted start, or a domain-satisfying mode (seeded pick).
  int cur = -1;
  if (policy.kind == PolicyKind::Scripted && !policy.schedule.empty())
    cur = cm.mode_index(policy.schedule.front().second);
  if (cur < 0) {
    std::vector<int> enabled;
    for (std::size_t i = 0; i < cm.modes.size(); ++i)
      if (domain_holds(cm, cm.modes[i], x, 0.0, opt.domain_tol)) enabled.push_back(static_cast<int>(i));
    if (enabled.empty()) {
      tr.stuck = true;
      tr.end_time = 0;
      return tr;
    }
    cur = (policy.kind == PolicyKind::RandomDwell || policy.kind == PolicyKind::GuardDriven)
              ? enabled[rng.pick(enabled.size())]
              : enabled.front();
  }

  auto growth = [&](const CompiledMode& md) {
    double acc = 0;
    for (std::size_t i = 0; i < cm.n_state; ++i) acc += x[i] * md.rhs[i].eval(x);
    return acc;
  };

  auto record = [&]() {
    tr.times.push_back(t);
    tr.modes.push_back(cm.modes[cur].id);
    tr.states.push_back(x);
    tr.tau.push_back(tau);
    if (!cm.v_polys.empty()) {
      std::vector<double> vs;
      vs.reserve(cm.v_polys.size());
      for (const auto& vp : cm.v_polys) vs.push_back(vp.eval(x));
      tr.v_values.push_back(std::move(vs));
    }
  };

  auto enabled_transitions = [&]() {
    std::vector<const Transition*> out;
    for (const auto& trn : m.transitions) {
      if (trn.from != cm.modes[cur].id) continue;
      if (cm.timed) {
        double theta = trn.min_dwell ? trn.min_dwell->to_double() : 0.0;
        if (tau + opt.domain_tol < theta) continue;
      } else if (!trn.guard.is_true() && !trn.guard.holds_at_double(cm.vars, x, opt.domain_tol)) {
        continue;
      }
      if (cm.mode_index(trn.to) < 0) continue;
      out.push_back(&trn);
    }
    return out;
  };

  auto apply_transition = [&](const Transition& trn, const std::string& reason) {
    for (const auto& [v, e] : trn.reset) {
      auto it = std::find(cm.vars.begin(), cm.vars.end(), v);
      if (it != cm.vars.end()) {
        CompiledPoly cp = compile_poly(e, cm.vars);
        x[static_cast<std::size_t>(it - cm.vars.begin())] = cp.eval(x);
      }
    }
    tr.events.push_back({t, trn.from, trn.to, reason});
    cur = cm.mode_index(trn.to);
    tau = 0.0;
  };

  auto switch_mode_state_dep = [&](const std::string& reason) -> bool {
    std::vector<int> enabled;
    for (std::size_t i = 0; i < cm.modes.size(); ++i) {
      if (!domain_holds(cm, cm.modes[i], x, 0.0, opt.domain_tol)) continue;
      // Viability: a micro-step must stay inside the candidate domain.
      std::vector<double> probe = x;
      rk4_step(cm.modes[i], probe, opt.dt * 1e-3);
      if (!domain_holds(cm, cm.modes[i], probe, 0.0, opt.domain_tol * 10)) continue;
      enabled.push_back(static_cast<int>(i));
    }
    if (enabled.empty()) return false;
    int next;
    if (policy.kind == PolicyKind::GreedyGrowth) {
      next = enabled.front();
      double best = -std::numeric_limits<double>::infinity();
      for (int e : enabled) {
        double g = growth(cm.modes[static_cast<std::size_t>(e)]);
        if (g > best) {
          best = g;
          next = e;
        }
      }
    } else {
      next = enabled[rng.pick(enabled.size())];
    }
    if (next != cur) {
      tr.events.push_back({t, cm.modes[static_cast<std::size_t>(cur)].id,
                           cm.modes[static_cast<std::size_t>(next)].id, reason});
      cur = next;
      tau = 0.0;
    }
    return true;
  };

  const double h_min = opt.h_min_steps * opt.dt;
  double next_attempt = rng.exp1();  // Poisson(1) spontaneous switch attempts
  double held = 0.0;
  std::size_t sched_next = (policy.kind == PolicyKind::Scripted && !policy.schedule.empty()) ? 1 : 0;

  record();
  while (t < opt.horizon - 1e-12) {
    double h = std::min(opt.dt, opt.horizon - t);
    if (policy.kind == PolicyKind::Scripted && sched_next < policy.schedule.size() &&
        t + h > policy.schedule[sched_next].first)
      h = std::max(policy.schedule[sched_next].first - t, 0.0);

    std::vector<double> x_prev = x;
    double tau_prev = tau;
    if (h > 0) {
      rk4_step(cm.modes[static_cast<std::size_t>(cur)], x, h);
      tau += h;
    }

    if (!domain_holds(cm, cm.modes[static_cast<std::size_t>(cur)], x, tau, opt.domain_tol)) {
      // Locate the exit point by bisection.
      double lo = 0.0, hi = h;
      for (int it = 0; it < opt.bisect_iters && hi - lo > 1e-9 * opt.dt; ++it) {
        double mid = 0.5 * (lo + hi);
        std::vector<double> xm = x_prev;
        rk4_step(cm.modes[static_cast<std::size_t>(cur)], xm, mid);
        if (domain_holds(cm, cm.modes[static_cast<std::size_t>(cur)], xm, tau_prev + mid, opt.domain_tol))
          lo = mid;
        else
          hi = mid;
      }
      x = x_prev;
      if (lo > 0) rk4_step(cm.modes[static_cast<std::size_t>(cur)], x, lo);
      tau = tau_prev + lo;
      t += lo;
      record();

      bool switched = false;
      if (m.kind == SwitchKind::StateDependent || m.kind == SwitchKind::Arbitrary) {
        switched = switch_mode_state_dep("domain-exit");
      } else {
        auto en = enabled_transitions();
        if (!en.empty()) {
          apply_transition(*en[rng.pick(en.size())], "domain-exit");
          switched = true;
        }
      }
      if (!switched) {
        tr.stuck = true;
        tr.end_time = t;
        return tr;
      }
      held = 0.0;
      record();
      continue;
    }

    t += h;
    held += h;
    record();

    if (policy.kind == PolicyKind::Scripted) {
      if (sched_next < policy.schedule.size() && t >= policy.schedule[sched_next].first - 1e-12) {
        int nxt = cm.mode_index(policy.schedule[sched_next].second);
        ++sched_next;
        if (nxt >= 0 && nxt != cur) {
          tr.events.push_back({t, cm.modes[static_cast<std::size_t>(cur)].id,
                               cm.modes[static_cast<std::size_t>(nxt)].id, "scripted"});
          cur = nxt;
          tau = 0.0;
        }
      }
      continue;
    }

    if (policy.kind == PolicyKind::GreedyGrowth) {
      if (held >= h_min - 1e-12) {
        switch_mode_state_dep("greedy");
        held = 0.0;
      }
      continue;
    }

    if (t >= next_attempt) {
      next_attempt = t + rng.exp1();
      if (m.kind == SwitchKind::StateDependent || m.kind == SwitchKind::Arbitrary) {
        if (held >= h_min - 1e-12 && switch_mode_state_dep("attempt")) held = 0.0;
      } else {
        auto en = enabled_transitions();
        if (!en.empty()) {
          apply_transition(*en[rng.pick(en.size())], "attempt");
          held = 0.0;
          record();
        }
      }
    }
  }
  tr.end_time = t;
  return tr;
}

bool audit_trace(const SwitchedModel& m, const Trace& tr, double tol, std::string* why) {
  CompiledModel cm = compile_model(m, nullptr);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    int mi = cm.mode_index(tr.modes[i]);
    if (mi < 0) {
      if (why) *why = "unknown mode " + tr.modes[i];
      return false;
    }
    if (!domain_holds(cm, cm.modes[static_cast<std::size_t>(mi)], tr.states[i], tr.tau[i], tol)) {
      if (why) *why = "domain violated at sample " + std::to_string(i);
      return false;
    }
  }
  if (m.kind == SwitchKind::Timed) {
    double last_switch = 0.0;
    for (const auto& e : tr.events) {
      double dwell = e.t - last_switch;
      for (const auto& trn : m.transitions)
        if (trn.from == e.from && trn.to == e.to && trn.min_dwell &&
            dwell + tol < trn.min_dwell->to_double()) {
          if (why) *why = "minimum dwell violated at t=" + std::to_string(e.t);
          return false;
        }
      const Mode* md = m.find_mode(e.from);
      if (md && md->max_dwell && dwell > md->max_dwell->to_double() + tol) {
        if (why) *why = "maximum dwell violated at t=" + std::to_string(e.t);
        return false;
      }
      last_switch = e.t;
    }
  }
  return true;
}

namespace {

std::vector<double> sample_ball(Rng& rng, std::size_t n, double radius) {
  std::vector<double> v(n);
  double norm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double u1 = std::max(rng.unit(), 1e-300), u2 = rng.unit();
    v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    norm += v[i] * v[i];
  }
  norm = std::sqrt(std::max(norm, 1e-300));
  double r = radius * std::pow(rng.unit(), 1.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
  for (auto& c : v) c = c / norm * r;
  return v;
}

}  // namespace

ProbeReport probe_stability(const SwitchedModel& m, const std::vector<double>& eps_list, int samples,
                            std::uint64_t seed, const SimOptions& opt, const LyapunovAssignment* A) {
  ProbeReport rep;
  const std::size_t n_state = m.state_vars.size();
  for (double eps : eps_list) {
    StabilityProbeEntry entry;
    entry.eps = eps;
    entry.samples = samples;
    for (int k = 1; k <= 8; ++k) {
      double delta = eps * std::pow(0.5, k);
      int violations = 0;
      Rng rng(seed + static_cast<std::uint64_t>(k) * 7919);
      for (int s = 0; s < samples; ++s) {
        std::vector<double> x0 = sample_ball(rng, n_state, delta);
        SwitchingPolicy pol = (m.kind == SwitchKind::Guarded || m.kind == SwitchKind::Timed ||
                               m.kind == SwitchKind::Controlled)
                                  ? SwitchingPolicy::guard_driven(seed * 1000003 + s)
                                  : SwitchingPolicy::random_dwell(seed * 1000003 + s);
        Trace tr = simulate(m, x0, pol, opt, A);
        bool bad = false;
        for (std::size_t i = 0; i < tr.times.size(); ++i)
          if (tr.state_norm(i, n_state) >= eps) {
            bad = true;
            break;
          }
        if (bad) {
          ++violations;
          if (rep.violation_traces.size() < 4) rep.violation_traces.push_back(tr);
        }
      }
      entry.violations = violations;
      if (violations == 0) {
        entry.delta = delta;
        break;
      }
    }
    rep.stability.push_back(entry);
  }
  return rep;
}

ProbeReport probe_attractivity(const SwitchedModel& m, double delta, double eps, int samples,
                               std::uint64_t seed, const SimOptions& opt, const Predicate* init_region,
                               const LyapunovAssignment* A) {
  ProbeReport rep;
  rep.attr_delta = delta;
  rep.attr_eps = eps;
  rep.attr_samples = samples;
  const std::size_t n_state = m.state_vars.size();
  Rng rng(seed);
  int stuck = 0, done = 0, attempts = 0;
  double worstT = 0;
  bool any_settled = false;
  while (done < samples && attempts < samples * 200) {
    ++attempts;
    std::vector<double> x0 = sample_ball(rng, n_state, delta);
    if (init_region && !init_region->holds_at_double(m.state_vars, x0, 0.0)) continue;
    ++done;
    SwitchingPolicy pol = (m.kind == SwitchKind::Guarded || m.kind == SwitchKind::Timed ||
                           m.kind == SwitchKind::Controlled)
                              ? SwitchingPolicy::guard_driven(seed * 2654435761ull + done)
                              : SwitchingPolicy::random_dwell(seed * 2654435761ull + done);
    Trace tr = simulate(m, x0, pol, opt, A);
    if (tr.stuck && tr.end_time < opt.horizon - opt.dt) {
      ++stuck;  // finite executions pass pre-attractivity vacuously
      continue;
    }
    double settle = -1;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      if (tr.state_norm(i, n_state) < eps) {
        if (settle < 0) settle = tr.times[i];
      } else {
        settle = -1;
      }
    }
    if (settle < 0) {
      ++rep.attr_violations;
      if (rep.violation_traces.size() < 4) rep.violation_traces.push_back(tr);
    } else {
      any_settled = true;
      worstT = std::max(worstT, settle);
    }
  }
  rep.attr_stuck = stuck;
  rep.all_stuck = done > 0 && stuck == done;
  if (any_settled) rep.attr_T = worstT;
  return rep;
}

std::pair<bool, std::optional<std::size_t>> check_trace_sublevel(const Trace& tr,
                                                                 const LyapunovAssignment& A,
                                                                 const Rational& W, double step_tol) {
  (void)A;  // values were sampled along the trace; A fixed the column set
  const double w = W.to_double();
  auto col_of = [&](const std::string& mode) -> int {
    for (std::size_t i = 0; i < tr.v_modes.size(); ++i)
      if (tr.v_modes[i] == mode) return static_cast<int>(i);
    return -1;
  };
  double prev = 0;
  std::string prev_mode;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    int c = col_of(tr.modes[i]);
    if (c < 0 || tr.v_values.empty()) return {false, i};
    double v = tr.v_values[i][static_cast<std::size_t>(c)];
    if (v >= w) return {false, i};
    if (i > 0 && tr.modes[i] == prev_mode && v > prev + step_tol) return {false, i};
    prev = v;
    prev_mode = tr.modes[i];
  }
  return {true, std::nullopt};
}

std::string ProbeReport::json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json st = nlohmann::ordered_json::array();
  for (const auto& e : stability) {
    nlohmann::ordered_json je;
    je["eps"] = e.eps;
    je["delta"] = e.delta;
    je["samples"] = e.samples;
    je["violations"] = e.violations;
    st.push_back(std::move(je));
  }
  j["stability"] = std::move(st);
  if (attr_samples > 0) {
    nlohmann::ordered_json ja;
    ja["delta"] = attr_delta;
    ja["eps"] = attr_eps;
    ja["T"] = attr_T;
    ja["samples"] = attr_samples;
    ja["violations"] = attr_violations;
    ja["stuck"] = attr_stuck;
    ja["all_stuck"] = all_stuck;
    j["attractivity"] = std::move(ja);
  }
  return j.dump(2);
}

}  // namespace swcert
