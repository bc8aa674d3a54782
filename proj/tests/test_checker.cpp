#include <random>

#include "doctest.h"
#include "swcert/checker.hpp"
#include "swcert/invariance.hpp"
#include "swcert/parser.hpp"

using namespace swcert;

namespace {

const std::vector<std::string> XY{"x", "y"};
const std::vector<std::string> X12{"x1", "x2"};

Poly P(const std::string& s, const std::vector<std::string>& vars) { return parse_poly(s, vars); }

VerificationCondition plain_vc(std::string id, Predicate hyp, Poly concl, Cmp cmp, bool excl) {
  VerificationCondition vc;
  vc.id = std::move(id);
  vc.hypothesis = std::move(hyp);
  vc.conclusion = {ExpTerm{concl, Rational(0)}};
  vc.cmp = cmp;
  vc.excluded_origin = excl;
  vc.vars = concl.vars();
  return vc;
}

CheckerConfig fast_cfg() {
  CheckerConfig cfg;
  cfg.falsify.budget = 4000;
  return cfg;
}

}  // namespace

TEST_CASE("pd check: planar Lyapunov Gram has pivots 1 and 511/1600") {
  RatMatrix Q(2, 2);
  Q << Rational(1), Rational::of(-33, 40), Rational::of(-33, 40), Rational(1);
  Verdict v = check_pd_quadratic(Q, true, X12);
  REQUIRE(v.is_proved());
  const auto& pd = *v.certificates[0].pd;
  CHECK(pd.D(0) == Rational(1));
  CHECK(pd.D(1) == Rational::of(511, 1600));
  std::string err;
  auto replayed = replay_certificate(v.certificates[0], &err);
  REQUIRE_MESSAGE(replayed.has_value(), err);
}

TEST_CASE("pd check: identity proved, saddle refuted with exact witness") {
  RatMatrix I(2, 2);
  I << Rational(1), Rational(0), Rational(0), Rational(1);
  CHECK(check_pd_quadratic(I, true, X12).is_proved());

  RatMatrix S(2, 2);
  S << Rational(0), Rational(1), Rational(1), Rational(0);
  Verdict v = check_pd_quadratic(S, true, X12);
  REQUIRE(v.is_refuted());
  const auto& cx = *v.counterexample;
  // Replay: v^T S v <= 0 exactly.
  Rational a = cx.point.at("x1"), b = cx.point.at("x2");
  CHECK(Rational(2) * a * b <= Rational(0));
  CHECK(cx.witnessed_value <= Rational(0));
}

TEST_CASE("quadratic Lie negativity of the planar fixture is proved exactly") {
  // -Lie = 1/8 x1^2 - 33/100 x1 x2 + 11/40 x2^2 is PD: minors 1/8, 143/20000.
  Poly lie = P("-1/8*x1^2 + 33/100*x1*x2 - 11/40*x2^2", X12);
  Predicate dom = Predicate::atom(P("x1*x2", X12), Cmp::Ge);
  VerificationCondition vc = plain_vc("lie:p", dom.closure(), lie, Cmp::Lt, true);
  Verdict v = check_vc(vc, fast_cfg());
  REQUIRE(v.is_proved());
  CHECK(v.certificates[0].kind == Certificate::Kind::PdFactorization);
}

TEST_CASE("compatibility equality discharges by exact polynomial division") {
  // x1 x2 >= 0 and x1 x2 <= 0 force x1 x2 = 0, where Vp - Vq = -(33/10) x1 x2.
  Predicate overlap =
      Predicate::atom(P("x1*x2", X12), Cmp::Ge).and_with(Predicate::atom(P("x1*x2", X12), Cmp::Le));
  Poly diff = P("-33/10*x1*x2", X12);
  Verdict le = check_vc(plain_vc("compat:le", overlap, diff, Cmp::Le, false), fast_cfg());
  Verdict ge = check_vc(plain_vc("compat:ge", overlap, diff, Cmp::Ge, false), fast_cfg());
  REQUIRE(le.is_proved());
  REQUIRE(ge.is_proved());
  CHECK(le.certificates[0].sos->eqs.size() == 1);
}

TEST_CASE("globally nonnegative square proves with a trivial Gram") {
  VerificationCondition vc = plain_vc("sq", Predicate::top(), P("x^2", {"x"}), Cmp::Ge, false);
  Verdict v = check_vc(vc, fast_cfg());
  REQUIRE(v.is_proved());
}

TEST_CASE("false guard yields a vacuous proof") {
  VerificationCondition vc =
      plain_vc("desc", Predicate::bottom(), P("x^2 - 3", {"x"}), Cmp::Le, false);
  Verdict v = check_vc(vc, fast_cfg());
  REQUIRE(v.is_proved());
  CHECK(v.certificates[0].kind == Certificate::Kind::Vacuous);

  // Contradictory conjunct counts as empty too.
  Predicate contra =
      Predicate::atom(P("x - 1", {"x"}), Cmp::Ge).and_with(Predicate::atom(P("x - 1", {"x"}), Cmp::Lt));
  Verdict v2 = check_vc(plain_vc("desc2", contra, P("x^2 - 3", {"x"}), Cmp::Le, false), fast_cfg());
  REQUIRE(v2.is_proved());
}

TEST_CASE("self-descent discharges trivially") {
  VerificationCondition vc = plain_vc("self", Predicate::top(), Poly(XY), Cmp::Le, false);
  CHECK(check_vc(vc, fast_cfg()).is_proved());
}

TEST_CASE("saturated-branch Lie negativity needs S-procedure multipliers") {
  // Domain x + y - 1 >= 0, 1 - x >= 0 with target = -Lie(V1) along the
  // saturated dynamics; negative definite only on the domain.
  Poly target = P("1/2*x^2 - 3/2*x*y + 3/2*y^2 + 1/2*x + y", XY);
  Predicate dom = Predicate::atom(P("x + y - 1", XY), Cmp::Ge)
                      .and_with(Predicate::atom(P("1 - x", XY), Cmp::Ge));
  VerificationCondition vc = plain_vc("lie:B1", dom, -target, Cmp::Lt, true);
  Verdict v = check_vc(vc, fast_cfg());
  REQUIRE_MESSAGE(v.is_proved(), v.reason);
  std::string err;
  REQUIRE_MESSAGE(replay_certificate(v.certificates[0], &err).has_value(), err);
}

TEST_CASE("restricted-region cubic Lie target at multiplier degree <= 2") {
  // 2(x^2+y^2)(1+z) > 0 away from the origin on {z >= 0, (x^2+y^2)/2 - z >= 0}.
  const std::vector<std::string> v3{"x", "y", "z"};
  Poly lie = P("-2*(x^2 + y^2)*(1 + z)", v3);
  Predicate hyp = Predicate::atom(P("z", v3), Cmp::Ge)
                      .and_with(Predicate::atom(P("(x^2 + y^2)/2 - z", v3), Cmp::Ge));
  VerificationCondition vc = plain_vc("lie-region:A", hyp, lie, Cmp::Lt, true);
  Verdict v = check_vc(vc, fast_cfg());
  REQUIRE_MESSAGE(v.is_proved(), v.reason);
}

TEST_CASE("tiny-coefficient candidate positivity is refuted by a dyadic witness") {
  const std::vector<std::string> IV{"intV", "relV"};
  Poly V = P(
      "572572089848357/144115188075855872*intV*relV"
      " + 256336575597239/281474976710656*relV^2"
      " + 6008302119812893/4611686018427387904*intV^2"
      " + 5787253314511645/618970019642690137449562112*relV"
      " + 5661677770976729/39614081257132168796771975168*intV",
      IV);
  Predicate box = Predicate::atom(P("intV + 500", IV), Cmp::Ge)
                      .and_with(Predicate::atom(P("500 - intV", IV), Cmp::Ge))
                      .and_with(Predicate::atom(P("relV + 15", IV), Cmp::Ge))
                      .and_with(Predicate::atom(P("15 - relV", IV), Cmp::Ge));
  VerificationCondition vc = plain_vc("positivity:normalPI", box, V, Cmp::Gt, true);
  CheckerConfig cfg = fast_cfg();
  cfg.falsify.budget = 100000;
  Verdict verdict = check_vc(vc, cfg);
  REQUIRE(verdict.is_refuted());
  const auto& cx = *verdict.counterexample;
  // The violation replays exactly and is tiny in magnitude.
  Rational val = evaluate(V, cx.point);
  CHECK(val.sign() < 0);
  CHECK(abs(val) < Rational(BigInt(1), BigInt(1) << 60));
  CHECK(vc.hypothesis.holds_at(cx.point));
}

TEST_CASE("exp conclusions: exponent zero is exact, negative exponent refutes") {
  Poly x2 = P("x^2", {"x"});
  auto dwell = [&](const Rational& e) {
    VerificationCondition vc;
    vc.id = "dwell";
    vc.hypothesis = Predicate::top();
    vc.conclusion = {ExpTerm{x2, Rational(0)}, ExpTerm{-x2, e}};
    vc.cmp = Cmp::Le;
    vc.vars = {"x"};
    return vc;
  };
  CheckerConfig cfg = fast_cfg();

  // Exponent assembled to zero is handled exactly as V_q - V_p <= 0.
  VerificationCondition exact = dwell(Rational(0));
  exact.conclusion = {ExpTerm{x2 - x2, Rational(0)}};
  CHECK(check_vc(exact, cfg).is_proved());

  // 1 <= e^{-6/5} is false: the upper enclosure bound is below 1.
  Verdict neg = check_vc(dwell(Rational::of(-6, 5)), cfg);
  REQUIRE(neg.is_refuted());
  CHECK(neg.counterexample->detail.find("bound") != std::string::npos);

  // 1 <= e^{1/2} holds: lower bound above 1.
  Verdict pos = check_vc(dwell(Rational::of(1, 2)), cfg);
  REQUIRE_MESSAGE(pos.is_proved(), pos.reason);
  CHECK(pos.certificates[0].kind == Certificate::Kind::ExpComparison);
}

TEST_CASE("check_vc agrees with the exact minor oracle on random 2x2 quadratics") {
  std::mt19937_64 rng(2024);
  int proved = 0, refuted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    long long a = static_cast<long long>(rng() % 9) - 4;
    long long b = static_cast<long long>(rng() % 9) - 4;
    long long c = static_cast<long long>(rng() % 9) - 4;
    RatMatrix Q(2, 2);
    Q << Rational(a), Rational(b), Rational(b), Rational(c);
    Poly form = poly_from_quadratic_form(Q, X12);
    if (form.is_zero()) continue;
    VerificationCondition vc = plain_vc("rand", Predicate::top(), form, Cmp::Gt, true);
    CheckerConfig cfg = fast_cfg();
    cfg.falsify.budget = 800;
    Verdict v = check_vc(vc, cfg);
    // Exact oracle: PD iff a > 0 and det > 0 (Sylvester minors).
    bool pd = a > 0 && (Rational(a) * Rational(c) - Rational(b) * Rational(b)) > Rational(0);
    if (pd) {
      ++proved;
      REQUIRE_MESSAGE(v.is_proved(), "a=" << a << " b=" << b << " c=" << c);
    } else {
      ++refuted;
      REQUIRE_MESSAGE(v.is_refuted(), "a=" << a << " b=" << b << " c=" << c << " (" << v.reason << ")");
      // Counterexample replays exactly.
      CHECK(evaluate(form, v.counterexample->point).sign() <= 0);
    }
  }
  CHECK(proved > 50);
  CHECK(refuted > 50);
}

TEST_CASE("radial markers: quadratic PD proves, degenerate refutes, quartic top part proves") {
  auto mk = [&](Poly V, std::vector<std::string> vars) {
    VerificationCondition vc;
    vc.id = "radial";
    vc.marker = VerificationCondition::Marker::Radial;
    vc.conclusion = {ExpTerm{V, Rational(0)}};
    vc.cmp = Cmp::Gt;
    vc.vars = std::move(vars);
    return vc;
  };
  CHECK(check_vc(mk(P("x1^2 + x2^2", X12), X12), fast_cfg()).is_proved());
  CHECK(check_vc(mk(P("5/4*x^2 + 1/2*x*y + 1/2*y^2 + x - 1/2", XY), XY), fast_cfg()).is_proved());
  CHECK(check_vc(mk(P("x1^2", X12), X12), fast_cfg()).is_refuted());
  Verdict quartic = check_vc(mk(P("x1^4 + x2^4 + x1^2", X12), X12), fast_cfg());
  REQUIRE_MESSAGE(quartic.is_proved(), quartic.reason);
}

TEST_CASE("darboux and barrier set invariance") {
  // Exact cancellation: p = (x^2+y^2)/2 - z along the spiral-down mode.
  SwitchedModel m;
  m.name = "inv";
  m.kind = SwitchKind::StateDependent;
  m.state_vars = {"x", "y", "z"};
  const auto& v3 = m.state_vars;
  Mode A;
  A.id = "A";
  A.field.rhs["x"] = P("-x + y", v3);
  A.field.rhs["y"] = P("-y - x", v3);
  A.field.rhs["z"] = P("-(x^2 + y^2)", v3);
  A.domain = Predicate::atom(P("z", v3), Cmp::Ge);
  m.modes.push_back(A);

  CheckerConfig cfg = fast_cfg();
  Poly p1 = P("(x^2 + y^2)/2 - z", v3);
  Verdict v = check_set_invariance(m, "A", p1, Cmp::Ge, cfg);
  REQUIRE(v.is_proved());
  // The certificate is the exact identity Lie(p) = 0: no squares, no eqs.
  CHECK(v.certificates[0].sos->blocks.empty());
  CHECK(v.certificates[0].sos->target.is_zero());

  // Companion atom: (x^2+y^2)/2 + z stays nonnegative via cofactor -4.
  Poly p2 = P("(x^2 + y^2)/2 + z", v3);
  Verdict v2 = check_set_invariance(m, "A", p2, Cmp::Ge, cfg);
  REQUIRE_MESSAGE(v2.is_proved(), v2.reason);

  // Linear Darboux: x' = -x keeps x >= 0 with Lie(x) = -x.
  SwitchedModel lin;
  lin.name = "lin";
  lin.kind = SwitchKind::StateDependent;
  lin.state_vars = {"x"};
  Mode s;
  s.id = "s";
  s.field.rhs["x"] = P("-x", {"x"});
  lin.modes.push_back(s);
  Verdict v3d = check_set_invariance(lin, "s", P("x", {"x"}), Cmp::Ge, cfg);
  REQUIRE(v3d.is_proved());
  REQUIRE(v3d.certificates[0].sos.has_value());
  CHECK(v3d.certificates[0].sos->eqs.size() == 1);
  CHECK(v3d.certificates[0].sos->eqs[0].multiplier == P("-1", {"x"}));

  // Constant p is trivially invariant.
  CHECK(check_set_invariance(lin, "s", P("1", {"x"}), Cmp::Ge, cfg).is_proved());
}

TEST_CASE("falsify is deterministic in the seed") {
  Poly target = P("x^2 - 1/4", {"x"});
  VerificationCondition vc = plain_vc("det", Predicate::top(), target, Cmp::Ge, false);
  FalsifyOptions fo;
  fo.budget = 500;
  fo.seed = 99;
  auto a = falsify(vc, fo);
  auto b = falsify(vc, fo);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->point == b->point);
  CHECK(a->witnessed_value == b->witnessed_value);
  fo.seed = 100;
  auto c = falsify(vc, fo);
  REQUIRE(c.has_value());
}
