#include <random>

#include "doctest.h"
#include "swcert/parser.hpp"
#include "swcert/poly.hpp"

using namespace swcert;

namespace {

const std::vector<std::string> XY{"x", "y"};
const std::vector<std::string> X12{"x1", "x2"};

Poly P(const std::string& s, const std::vector<std::string>& vars) { return parse_poly(s, vars); }

// Independent oracle: directional derivative by central finite differences.
double fd_lie(const Poly& V, const VectorField& f, const std::vector<double>& pt, double h = 1e-6) {
  double acc = 0.0;
  for (std::size_t i = 0; i < V.vars().size(); ++i) {
    std::vector<double> hi = pt, lo = pt;
    hi[i] += h;
    lo[i] -= h;
    double dV = (evaluate_double(V, hi) - evaluate_double(V, lo)) / (2 * h);
    acc += dV * evaluate_double(f.rhs.at(V.vars()[i]).aligned_to(V.vars()), pt);
  }
  return acc;
}

std::map<std::string, Rational> pt(const std::vector<std::string>& vars, std::vector<Rational> vals) {
  std::map<std::string, Rational> m;
  for (std::size_t i = 0; i < vars.size(); ++i) m[vars[i]] = vals[i];
  return m;
}

}  // namespace

TEST_CASE("lie derivative of a constant is zero") {
  VectorField f;
  f.rhs["x"] = P("-x", {"x"});
  CHECK(lie_derivative(Poly::constant(Rational(5), {"x"}), f).is_zero());
}

TEST_CASE("lie derivative matches the two-mode planar fixture") {
  // d/dt (x1^2 - 33/20 x1 x2 + x2^2) along x1' = -4.6x1+5.5x2, x2' = -5.5x1+4.4x2
  VectorField f;
  f.rhs["x1"] = P("-4.6*x1 + 5.5*x2", X12);
  f.rhs["x2"] = P("-5.5*x1 + 4.4*x2", X12);
  Poly V = P("x1^2 - 33/20*x1*x2 + x2^2", X12);
  Poly lie = lie_derivative(V, f);
  CHECK(lie == P("-1/8*x1^2 + 33/100*x1*x2 - 11/40*x2^2", X12));
}

TEST_CASE("lie derivative matches the closed-form identity at fixed parameters") {
  // V1 along the saturated branch: -(b-c)y^2 - a c x^2 + (c x + y)(f x + g y + gamma)
  // at a=2, b=3, f=1, g=1, gamma=-1, c=1/2.
  VectorField fB;
  fB.rhs["x"] = P("y", XY);
  fB.rhs["y"] = P("-x - 2*y - 1", XY);  // -(a-f)x - (b-g)y + gamma
  Poly V1 = P("7/4*x^2 + 1/2*x*y + 1/2*y^2", XY);
  Poly expected = P("-(3 - 1/2)*y^2 - 2*(1/2)*x^2 + (1/2*x + y)*(x + y - 1)", XY);
  CHECK(lie_derivative(V1, fB) == expected);
}

TEST_CASE("lie derivative is linear and satisfies the Leibniz rule") {
  std::mt19937_64 rng(42);
  auto rnd_poly = [&](unsigned deg) {
    Poly p(XY);
    for (unsigned dx = 0; dx <= deg; ++dx)
      for (unsigned dy = 0; dx + dy <= deg; ++dy) {
        long long c = static_cast<long long>(rng() % 11) - 5;
        if (c == 0) continue;
        Monomial m{{dx, dy}};
        p.add_term(m, Rational(c));
      }
    return p;
  };
  VectorField f;
  f.rhs["x"] = rnd_poly(2);
  f.rhs["y"] = rnd_poly(2);
  for (int i = 0; i < 25; ++i) {
    Poly p = rnd_poly(3), q = rnd_poly(3);
    Rational a = Rational(static_cast<long long>(rng() % 7) - 3);
    Rational b = Rational(static_cast<long long>(rng() % 7) - 3);
    CHECK(lie_derivative(p.scaled(a) + q.scaled(b), f) ==
          lie_derivative(p, f).scaled(a) + lie_derivative(q, f).scaled(b));
    CHECK(lie_derivative(p * q, f) == p * lie_derivative(q, f) + q * lie_derivative(p, f));
  }
}

TEST_CASE("lie derivative agrees with finite differences at random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  auto rnd_poly = [&](unsigned deg) {
    Poly p(XY);
    for (unsigned dx = 0; dx <= deg; ++dx)
      for (unsigned dy = 0; dx + dy <= deg; ++dy) {
        long long c = static_cast<long long>(rng() % 9) - 4;
        if (c == 0) continue;
        p.add_term(Monomial{{dx, dy}}, Rational(c));
      }
    return p;
  };
  for (int trial = 0; trial < 50; ++trial) {
    VectorField f;
    f.rhs["x"] = rnd_poly(2);
    f.rhs["y"] = rnd_poly(2);
    Poly V = rnd_poly(3);
    Poly lie = lie_derivative(V, f);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> p{U(rng), U(rng)};
      double sym = evaluate_double(lie.aligned_to(XY), p);
      double fd = fd_lie(V, f, p);
      double scale = std::max({1.0, std::abs(sym), std::abs(fd)});
      CHECK(std::abs(sym - fd) / scale < 1e-6);
    }
  }
}

TEST_CASE("lie derivative rejects undefined variables") {
  VectorField f;
  f.rhs["x"] = P("-x", {"x"});
  Poly V = P("x*z", {"x", "z"});
  CHECK_THROWS(lie_derivative(V, f));
}

TEST_CASE("evaluate: exact values") {
  Poly V = P("x1^2 - 33/20*x1*x2 + x2^2", X12);
  CHECK(evaluate(V, pt(X12, {Rational(1), Rational(1)})) == Rational::of(7, 20));
  CHECK(evaluate(P("x^2 + x*y", XY), pt(XY, {Rational(0), Rational(0)})) == Rational(0));
  CHECK_THROWS(evaluate(V, {{"x1", Rational(1)}}));
}

TEST_CASE("evaluate: tiny-coefficient candidate is negative at the dyadic witness") {
  const std::vector<std::string> IV{"intV", "relV"};
  Poly V = P(
      "572572089848357/144115188075855872*intV*relV"
      " + 256336575597239/281474976710656*relV^2"
      " + 6008302119812893/4611686018427387904*intV^2"
      " + 5787253314511645/618970019642690137449562112*relV"
      " + 5661677770976729/39614081257132168796771975168*intV",
      IV);
  Rational v = evaluate(V, pt(IV, {Rational(BigInt(-1), BigInt(1) << 34), Rational(0)}));
  CHECK(v.sign() < 0);
  double d = v.to_double();
  CHECK(d == doctest::Approx(-3.90488e-24).epsilon(1e-4));
}

TEST_CASE("substitute: binomial expansion and absent variables") {
  Poly x2 = P("x^2", {"x"});
  std::map<std::string, Poly> b{{"x", P("x + 1", {"x"})}};
  CHECK(substitute(x2, b) == P("x^2 + 2*x + 1", {"x"}));

  Poly V = P("intV^2 + relV^2", {"intV", "relV"});
  std::map<std::string, Poly> reset{{"t", Poly::constant(Rational(0), {"t"})}};
  CHECK(substitute(V, reset) == V.aligned_to(merge_vars({"intV", "relV"}, {"t"})));
}

TEST_CASE("substitute then evaluate equals evaluate after substitution") {
  // V2 of the saturated system at x -> 0, y -> 0 equals -gamma^2/(2f) = -1/2.
  Poly V2 = P("5/4*x^2 + 1/2*x*y + 1/2*y^2 + x - 1/2", XY);
  std::map<std::string, Poly> zero{{"x", Poly::constant(Rational(0), XY)},
                                   {"y", Poly::constant(Rational(0), XY)}};
  Poly s = substitute(V2, zero);
  CHECK(s.is_constant());
  CHECK(s.constant_term() == Rational::of(-1, 2));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    auto r = [&]() { return Rational(static_cast<long long>(rng() % 9) - 4); };
    std::map<std::string, Poly> bind{{"x", P("y + 1", XY).scaled(r())}, {"y", P("x", XY).scaled(r())}};
    auto point = pt(XY, {r(), r()});
    Rational lhs = evaluate(substitute(V2, bind), point);
    std::map<std::string, Rational> moved{{"x", evaluate(bind.at("x"), point)},
                                          {"y", evaluate(bind.at("y"), point)}};
    CHECK(lhs == evaluate(V2, moved));
  }
}

TEST_CASE("exact division") {
  Poly prod = P("(x + y)*(x - y)", XY);
  auto q = exact_divide(prod, P("x + y", XY));
  REQUIRE(q.has_value());
  CHECK(*q == P("x - y", XY));
  CHECK(!exact_divide(P("x^2 + 1", XY), P("x + y", XY)).has_value());
  // compatibility shape: -(33/10) x1 x2 divided by x1 x2
  auto m = exact_divide(P("-33/10*x1*x2", X12), P("x1*x2", X12));
  REQUIRE(m.has_value());
  CHECK(m->is_constant());
  CHECK(m->constant_term() == Rational::of(-33, 10));
}

TEST_CASE("quadratic form round trip") {
  Poly V = P("x1^2 - 33/20*x1*x2 + x2^2", X12);
  auto Q = quadratic_form(V);
  REQUIRE(Q.has_value());
  CHECK((*Q)(0, 1) == Rational::of(-33, 40));
  CHECK(poly_from_quadratic_form(*Q, X12) == V);
  CHECK(!quadratic_form(P("x1^3", X12)).has_value());
}

TEST_CASE("printing is deterministic and parses back") {
  Poly V = P("x1^2 - 33/20*x1*x2 + x2^2", X12);
  CHECK(parse_poly(V.str(), X12) == V);
  CHECK(Poly(X12).str() == "0");
}
