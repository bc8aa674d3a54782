#include "doctest.h"
#include "swcert/parser.hpp"
#include "swcert/program_ir.hpp"

using namespace swcert;

namespace {

const char* kTwoModePlanar = R"(
system example7 {
  var x1, x2;
  kind state;
  mode p {
    ode { x1' = -4.6*x1 + 5.5*x2; x2' = -5.5*x1 + 4.4*x2 }
    domain x1*x2 >= 0
  }
  mode q {
    ode { x1' = 4.4*x1 + 5.5*x2; x2' = -5.5*x1 - 4.6*x2 }
    domain x1*x2 <= 0
  }
  lyapunov p : x1^2 - 1.65*x1*x2 + x2^2;
  lyapunov q : x1^2 + 1.65*x1*x2 + x2^2;
}
)";

const char* kPiSnippet = R"(
system cruise_snippet {
  var relV;
  aux intV, t;
  kind controlled;
  mode normalPI {
    ode { relV' = -0.001*intV - 0.052*relV; intV' = relV; t' = 0 }
    domain relV >= -15 & relV <= 15 & intV >= -500 & intV <= 500
  }
  transition normalPI -> sbrakeact when relV >= 13 & relV <= 15 & intV >= -500 & intV <= 500 reset t := 0;
  transition normalPI -> accelerate when relV >= -15 & relV <= -14 & intV >= -500 & intV <= 500;
}
)";

SwitchedModel must_parse(const std::string& text) {
  ParseResult r = parse_model(text);
  REQUIRE_MESSAGE(r.ok(), r.diagnostics.str());
  return *r.model;
}

}  // namespace

TEST_CASE("two-mode planar model parses with exact constants") {
  SwitchedModel m = must_parse(kTwoModePlanar);
  CHECK(m.kind == SwitchKind::StateDependent);
  REQUIRE(m.modes.size() == 2);
  CHECK(m.modes[0].field.rhs.at("x1") == parse_poly("-23/5*x1 + 11/2*x2", {"x1", "x2"}));
  CHECK(m.lyapunov.at("p") == parse_poly("x1^2 - 33/20*x1*x2 + x2^2", {"x1", "x2"}));
  CHECK(well_formed(m).ok());
}

TEST_CASE("abridged PI snippet parses to one mode and two transitions") {
  ParseResult r = parse_model(kPiSnippet);
  REQUIRE(r.model.has_value());
  CHECK(r.model->kind == SwitchKind::Controlled);
  CHECK(r.model->modes.size() == 1);
  CHECK(r.model->transitions.size() == 2);
  // Endpoints are dangling in the snippet; that is a well-formedness error,
  // not a parse error.
  CHECK(!well_formed(*r.model).ok());
}

TEST_CASE("degenerate inputs produce diagnostics") {
  ParseResult r = parse_model("system empty { var x; kind state; }");
  CHECK(!r.ok());
  bool found = false;
  for (const auto& d : r.diagnostics.items)
    if (d.message.find("at least one mode required") != std::string::npos) found = true;
  CHECK(found);

  ParseResult dup = parse_model(R"(
    system d { var x; kind state;
      mode a { ode { x' = -x } }
      mode a { ode { x' = -x } }
    })");
  CHECK(!dup.ok());

  ParseResult unk = parse_model(R"(
    system u { var x; kind state; mode a { ode { y' = -y } } })");
  CHECK(!unk.ok());
}

TEST_CASE("well-formedness: timed kind requires dwell data") {
  const char* text = R"(
system t {
  var x;
  kind timed;
  mode s { ode { x' = -x } }
  mode u { ode { x' = x } }
}
)";
  SwitchedModel m = must_parse(text);
  Diagnostics d = well_formed(m);
  CHECK(!d.ok());
  bool found = false;
  for (const auto& item : d.items)
    if (item.message.find("Timed kind requires dwell data") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("well-formedness: resets must not write state variables") {
  const char* text = R"(
system c {
  var x1;
  aux y;
  kind controlled;
  mode a { ode { x1' = -x1 } }
  transition a -> a when x1 >= 1 reset x1 := 0;
}
)";
  SwitchedModel m = must_parse(text);
  Diagnostics d = well_formed(m);
  CHECK(!d.ok());
  bool found = false;
  for (const auto& item : d.items)
    if (item.message.find("reset writes state variable x1") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("parse of pretty print is structurally equal") {
  SwitchedModel m = must_parse(kTwoModePlanar);
  SwitchedModel m2 = must_parse(pretty_print(m));
  CHECK(pretty_print(m) == pretty_print(m2));
  CHECK(model_hash(m) == model_hash(m2));
  CHECK(m.lyapunov.at("q") == m2.lyapunov.at("q"));
  CHECK(m.modes[1].domain == m2.modes[1].domain);
}

TEST_CASE("ghost split keeps dynamics and splits the domain") {
  SwitchedModel m = must_parse(R"(
system canon {
  const a = 2; const b = 3; const f = 1; const g = 1; const gam = -1;
  var x, y;
  kind state;
  mode A {
    ode { x' = y; y' = -a*x - b*y }
    domain f*x + g*y + gam <= 0
  }
  mode B {
    ode { x' = y; y' = -(a-f)*x - (b-g)*y + gam }
    domain f*x + g*y + gam >= 0
  }
})");
  Poly split = parse_poly("x - 1", {"x", "y"});  // f*x + gam at f=1, gam=-1
  SwitchedModel s1 = ghost_split(m, "A", split);
  REQUIRE(s1.modes.size() == 3);
  SwitchedModel s2 = ghost_split(s1, "B", split);
  REQUIRE(s2.modes.size() == 4);
  CHECK(s2.modes[0].id == "A_1");
  CHECK(s2.modes[1].id == "A_2");
  //

  // Same field, conjoined domains.
  CHECK(s2.modes[0].field.rhs.at("y") == m.modes[0].field.rhs.at("y"));
  Predicate expect_a1 = m.modes[0].domain.and_with(Predicate::atom(split, Cmp::Le));
  CHECK(s2.modes[0].domain == expect_a1);

  // Union of the split domains covers the original one: sampled membership.
  for (int xi = -3; xi <= 3; ++xi) {
    for (int yi = -3; yi <= 3; ++yi) {
      std::map<std::string, Rational> pt{{"x", Rational(xi)}, {"y", Rational(yi)}};
      bool orig = m.modes[0].domain.holds_at(pt);
      bool split_union = s2.modes[0].domain.holds_at(pt) || s2.modes[1].domain.holds_at(pt);
      CHECK(orig == split_union);
    }
  }
  CHECK_THROWS(ghost_split(m, "nope", split));

  // Degenerate split by the zero polynomial: both halves keep the domain.
  SwitchedModel z = ghost_split(m, "A", Poly({"x", "y"}));
  CHECK(z.modes[0].domain == m.modes[0].domain);
  CHECK(z.modes[1].domain == m.modes[0].domain);
}

TEST_CASE("dot rendering") {
  SwitchedModel m = must_parse(kTwoModePlanar);
  std::string dot = emit_dot(m);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("\"p\"") != std::string::npos);
  CHECK(dot.find("\"q\"") != std::string::npos);
  CHECK(dot.find("->") == dot.rfind("->"));  // rankdir only, no transition edges

  SwitchedModel c = *parse_model(kPiSnippet).model;
  std::string cdot = emit_dot(c);
  CHECK(cdot.find("\"normalPI\" -> \"sbrakeact\"") != std::string::npos);
  CHECK(cdot.find("t := 0") != std::string::npos);
}

TEST_CASE("controller paths of a timed model") {
  const char* text = R"(
system timed2 {
  var x;
  kind timed;
  mode s { ode { x' = -x } }
  mode u { ode { x' = x } maxdwell 1 }
  transition s -> u mindwell 1;
  transition u -> s mindwell 1/2;
  lyapunov s : x^2;
  lyapunov u : x^2;
  rate s : 2;
  rate u : -2;
}
)";
  SwitchedModel m = must_parse(text);
  CHECK(well_formed(m).ok());
  auto paths = controller_paths(m);
  // one switching path per transition plus a stay branch per mode
  CHECK(paths.size() == 4);
  int switches = 0;
  for (const auto& p : paths) {
    if (p.stay) continue;
    ++switches;
    CHECK(p.resets.count("tau") == 1);
    CHECK(!p.tests.is_true());  // theta <= tau test
  }
  CHECK(switches == 2);

  ControllerIR ir = to_program(m);
  std::string s = ir.controller.str();
  CHECK(s.find("tau := 0") != std::string::npos);
  CHECK(s.find("u := s") != std::string::npos);
}

TEST_CASE("arbitrary single-mode program is a loop over one branch") {
  SwitchedModel m = must_parse(R"(
system one { var x; kind arbitrary; mode only { ode { x' = -x } } })");
  CHECK(well_formed(m).ok());
  ControllerIR ir = to_program(m);
  CHECK(ir.plant.size() == 1);
  auto paths = controller_paths(m);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].stay);
}
