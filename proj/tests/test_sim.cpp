#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "swcert/parser.hpp"
#include "swcert/sim.hpp"

using namespace swcert;

namespace {

SwitchedModel load_fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  ParseResult r = parse_model(buf.str());
  REQUIRE_MESSAGE(r.ok(), r.diagnostics.str());
  return *r.model;
}

SwitchedModel scalar_decay() {
  ParseResult r = parse_model("system d { var x; kind arbitrary; mode only { ode { x' = -x } } }");
  REQUIRE(r.ok());
  return *r.model;
}

double endpoint_error(const SwitchedModel& m, double dt) {
  SimOptions opt;
  opt.dt = dt;
  opt.horizon = 5.0;
  Trace tr = simulate(m, {1.0}, SwitchingPolicy::random_dwell(7), opt);
  double xT = tr.states.back()[0];
  return std::abs(xT - std::exp(-5.0));
}

}  // namespace

TEST_CASE("rk4 endpoint accuracy on exponential decay") {
  SwitchedModel m = scalar_decay();
  CHECK(endpoint_error(m, 1e-3) < 1e-6);
}

TEST_CASE("halving the step shrinks the endpoint error by the fourth-order factor") {
  SwitchedModel m = scalar_decay();
  double e1 = endpoint_error(m, 0.05);
  double e2 = endpoint_error(m, 0.025);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("traces are byte-identical for equal seeds") {
  SwitchedModel m = load_fixture("example7.ssm");
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  SimOptions opt;
  opt.horizon = 2.0;
  Trace a = simulate(m, {0.05, 0.05}, SwitchingPolicy::random_dwell(99), opt, &A);
  Trace b = simulate(m, {0.05, 0.05}, SwitchingPolicy::random_dwell(99), opt, &A);
  CHECK(a.csv() == b.csv());
  Trace c = simulate(m, {0.05, 0.05}, SwitchingPolicy::random_dwell(100), opt, &A);
  CHECK(a.csv() != c.csv());  // different seed, different switching choices
}

TEST_CASE("csv header names the variables, the timer and the candidate columns") {
  SwitchedModel m = load_fixture("example7.ssm");
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  SimOptions opt;
  opt.horizon = 0.01;
  Trace tr = simulate(m, {0.05, 0.05}, SwitchingPolicy::random_dwell(1), opt, &A);
  std::string head = tr.csv().substr(0, tr.csv().find('\n'));
  CHECK(head == "t,mode,x1,x2,tau,V_p,V_q");
  CHECK(tr.events_json().find("\"events\"") != std::string::npos);
}

TEST_CASE("planar fixture trajectories stay trapped in the active sublevel set") {
  SwitchedModel m = load_fixture("example7.ssm");
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  // max(V_p, V_q)(x0) < 0.012 for x0 = (0.05, 0.05).
  std::map<std::string, Rational> pt{{"x1", Rational::of(1, 20)}, {"x2", Rational::of(1, 20)}};
  for (const auto& [mode, V] : A.V) CHECK(evaluate(V, pt) < Rational::of(3, 250));
  SimOptions opt;
  opt.horizon = 10.0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Trace tr = simulate(m, {0.05, 0.05}, SwitchingPolicy::random_dwell(seed), opt, &A);
    auto [ok, at] = check_trace_sublevel(tr, A, Rational::of(3, 250));
    CHECK_MESSAGE(ok, "violation at sample " << (at ? *at : 0) << " seed " << seed);
    std::string why;
    CHECK_MESSAGE(audit_trace(m, tr, 1e-5, &why), why);
    CHECK(tr.events.size() > 0);
  }
}

TEST_CASE("sublevel check flags a growing active candidate") {
  // Single growing mode: active V = x^2 increases along x' = x.
  ParseResult r = parse_model(R"(
system g { var x; kind arbitrary; mode u { ode { x' = x } } lyapunov u : x^2; })");
  REQUIRE(r.ok());
  LyapunovAssignment A = LyapunovAssignment::from_model(*r.model);
  SimOptions opt;
  opt.horizon = 1.0;
  Trace tr = simulate(*r.model, {0.05}, SwitchingPolicy::random_dwell(5), opt, &A);
  auto [ok, at] = check_trace_sublevel(tr, A, Rational::of(3, 250));
  CHECK(!ok);
  REQUIRE(at.has_value());
  CHECK(*at > 0);

  // The all-zero trajectory passes trivially.
  Trace z = simulate(*r.model, {0.0}, SwitchingPolicy::random_dwell(5), opt, &A);
  CHECK(check_trace_sublevel(z, A, Rational::of(3, 250)).first);
}

TEST_CASE("probe_stability finds a positive delta for the certified planar fixture") {
  SwitchedModel m = load_fixture("example7.ssm");
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  SimOptions opt;
  opt.horizon = 6.0;
  opt.dt = 2e-3;
  ProbeReport rep = probe_stability(m, {0.3}, 200, 42, opt, &A);
  REQUIRE(rep.stability.size() == 1);
  CHECK(rep.stability[0].delta > 0.0);
  CHECK(rep.stability[0].violations == 0);
}

TEST_CASE("stripped domains admit destabilizing alternation") {
  SwitchedModel m = load_fixture("example7.ssm");
  SwitchedModel stripped = m;
  stripped.kind = SwitchKind::Arbitrary;
  for (auto& md : stripped.modes) md.domain = Predicate::top();
  SimOptions opt;
  opt.horizon = 8.0;
  opt.dt = 2e-3;
  // Greedy growth chooses the worst enabled mode at each hold boundary.
  Trace tr = simulate(stripped, {0.01, 0.01}, SwitchingPolicy::greedy_growth(), opt);
  double worst = 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) worst = std::max(worst, tr.state_norm(i, 2));
  CHECK(worst > 1.0);  // grew from 0.014 past any stability bound
}

TEST_CASE("timed demo cycles honor dwell bounds and decay per stable phase") {
  SwitchedModel m = load_fixture("timed_demo.ssm");
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  SimOptions opt;
  opt.horizon = 12.0;
  Trace tr = simulate(m, {1.0}, SwitchingPolicy::guard_driven(11), opt, &A);
  std::string why;
  CHECK_MESSAGE(audit_trace(m, tr, 1e-5, &why), why);
  REQUIRE(tr.events.size() >= 2);

  // Across each stay in mode s of duration d, V shrinks by at least e^{-2d}
  // (exact for x' = -x), checked with integration slack.
  double enter_t = 0.0;
  double enter_v = tr.v_values.front()[0];
  std::string cur = tr.modes.front();
  std::size_t vcol_s = tr.v_modes[0] == "s" ? 0 : 1;
  for (const auto& e : tr.events) {
    if (e.from == "s") {
      // find V at the event time
      std::size_t idx = 0;
      while (idx + 1 < tr.times.size() && tr.times[idx] < e.t - 1e-12) ++idx;
      double d = e.t - enter_t;
      if (d > 0.5) {
        double ratio = tr.v_values[idx][vcol_s] / std::max(enter_v, 1e-300);
        CHECK(ratio <= std::exp(-2.0 * d) * 1.05);
      }
    }
    enter_t = e.t;
    std::size_t idx = 0;
    while (idx + 1 < tr.times.size() && tr.times[idx] < e.t - 1e-12) ++idx;
    enter_v = tr.v_values[idx][vcol_s];
  }
}

TEST_CASE("integrator trajectories leave the axis region handling and settle") {
  SwitchedModel m = load_fixture("brockett_event.ssm");
  LyapunovAssignment A = LyapunovAssignment::from_model(m);
  SimOptions opt;
  opt.horizon = 20.0;
  opt.dt = 2e-3;
  ProbeReport rep = probe_attractivity(m, 1.0, 0.1, 100, 2024, opt, &*m.region, &A);
  CHECK(rep.attr_violations == 0);
  CHECK(rep.attr_T >= 0.0);
  CHECK(rep.attr_T < 20.0);
}

TEST_CASE("empty-domain models report every execution stuck") {
  ParseResult r = parse_model(R"(
system stuck {
  var x;
  kind state;
  mode a { ode { x' = -x } domain x >= 0 & x <= 0 }
})");
  REQUIRE(r.ok());
  SimOptions opt;
  opt.horizon = 1.0;
  ProbeReport rep = probe_attractivity(*r.model, 1.0, 0.5, 20, 3, opt);
  CHECK(rep.all_stuck);
  CHECK(rep.attr_violations == 0);
}
