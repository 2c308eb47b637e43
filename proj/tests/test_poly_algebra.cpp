#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dirac/acceptance.hpp"
#include "dirac/errors.hpp"
#include "dirac/poly_algebra.hpp"

using namespace dirac;

namespace {

RationalObservable P(const char* s) { return parse_observable(s); }

PhasePoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  return {u(rng), u(rng), u(rng), u(rng)};
}

// Central difference in one chart variable.
double numeric_partial(const CompiledObservable& f, PhasePoint x, Var v, double radius) {
  const double h = 1e-5;
  PhasePoint a = x, b = x;
  a[slot(v)] += h;
  b[slot(v)] -= h;
  return (f(a, radius) - f(b, radius)) / (2 * h);
}

}  // namespace

TEST_CASE("derivative examples") {
  CHECK(differentiate(P("q1^2"), Var::q1) == P("2*q1"));
  CHECK(differentiate(P("p2"), Var::q2).is_zero());
  CHECK(differentiate(P("1/q2"), Var::q2) == P("-1/q2^2"));
  CHECK(differentiate(P("1/q2"), Var::q2).to_string() == "-1/q2^2");
}

TEST_CASE("Poisson bracket examples") {
  CHECK(poisson_bracket(P("q1"), P("p1")) == RationalObservable(1));
  CHECK(poisson_bracket(P("p2"), P("q1^2 + q2^2 + p1^2 + p2^2 - R^2")) == P("-2*q2"));
  CHECK(poisson_bracket(P("q1*p1"), P("q1^2")) == P("-2*q1^2"));
  CHECK(poisson_bracket(P("R^2"), P("q1")).is_zero());
}

TEST_CASE("evaluate examples") {
  CHECK(evaluate(P("q1^2 + p1^2"), {1, 1, 2, 0}, 2.0) == 5.0);
  CHECK(evaluate(P("-q1/q2"), {3, 2, 0, 0}, 2.0) == -1.5);
  CHECK_THROWS_AS(evaluate(P("1/q2"), {1, 0, 1, 0}, 2.0), DenominatorVanishes);
  CHECK_THROWS_AS(CompiledObservable(P("1/q2"))({1, 0, 1, 0}, 2.0), DenominatorVanishes);
  CHECK(evaluate(P("R^2 - q1^2"), {1, 0, 0, 0}, 2.0) == 3.0);
}

TEST_CASE("rational normalisation and printing") {
  CHECK(P("-q1/q2").to_string() == "-q1/q2");
  CHECK(P("q1*q2/q2^2") == P("q1/q2"));
  CHECK(P("q1*q2/q2^2").to_string() == "q1/q2");
  CHECK(P("1/(2*q2)").to_string() == "1/(2*q2)");
  CHECK(P("(q1 + p1)/(-q2)") == P("-(q1 + p1)/q2"));
  CHECK(P("(q1^2 - 1)/(q1 - 1)") == P("q1 + 1"));
  CHECK(P("q1^2 + q2^2 + p1^2 - R^2").to_string() == "q1^2 + q2^2 + p1^2 - R^2");
  CHECK(P("q2^2/3").to_string() == "1/3*q2^2");
  CHECK(P("0.5*q1") == P("q1/2"));
  CHECK(RationalObservable(P("q1").numerator(), Polynomial(4)).to_string() == "1/4*q1");
  CHECK_THROWS_AS(RationalObservable(Polynomial(1), Polynomial()), DenominatorVanishes);
  CHECK_THROWS_AS(P("q1") / RationalObservable(0), DenominatorVanishes);
}

TEST_CASE("polynomial queries") {
  const Polynomial p = P("3*q1^2*q2 - R^2 + 2").numerator();
  CHECK(p.degree_in(slot(Var::q1)) == 2);
  CHECK(p.degree_in(kRadiusSlot) == 2);
  CHECK(p.total_degree() == 3);
  CHECK_FALSE(p.is_chart_constant());
  CHECK(P("R^2 + 1").numerator().is_chart_constant());
  const auto parts = p.collect(slot(Var::q2));
  CHECK(parts.at(1) == P("3*q1^2").numerator());
  CHECK(parts.at(0) == P("2 - R^2").numerator());
  CHECK(p.substitute(slot(Var::q1), 1) == P("3*q2 - R^2 + 2").numerator());
  CHECK(P("6*q1 + 4*p1").numerator().content() == 2);
  CHECK(substitute_radius(P("q1^2 - R^2"), 2.0) == P("q1^2 - 4"));
  CHECK(substitute_radius(P("R"), 0.5) == P("1/2"));
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse_observable("q1 +"), ParseError);
  CHECK_THROWS_AS(parse_observable("q3"), ParseError);
  CHECK_THROWS_AS(parse_observable("(q1"), ParseError);
  CHECK_THROWS_AS(parse_observable("q1^-1"), ParseError);
  CHECK_THROWS_AS(parse_observable(""), ParseError);
  CHECK_THROWS_AS(parse_observable("q1 q2"), ParseError);
}

TEST_CASE("canonical chart") {
  const auto& c = CanonicalChart::standard();
  CHECK_NOTHROW(c.validate());
  CHECK(c.conjugate(Var::q2) == Var::p2);
  CHECK(c.conjugate(Var::p1) == Var::q1);
  CHECK(c.is_coordinate(Var::q1));
  CHECK_FALSE(c.is_coordinate(Var::p2));
  CanonicalChart bad = c;
  bad.pairs[1] = {Var::q1, Var::p2};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("property: ring axioms on random polynomials") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Polynomial a = random_polynomial(rng, 3), b = random_polynomial(rng, 3), c = random_polynomial(rng, 3);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - a).is_zero());
    CHECK(a.total_degree() + b.total_degree() == (a * b).total_degree());
  }
}

TEST_CASE("property: printing round-trips through the parser") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const RationalObservable f(random_polynomial(rng, 4), random_polynomial(rng, 2) + Polynomial(7));
    CHECK(parse_observable(f.to_string()) == f);
  }
}

TEST_CASE("property: exact derivatives agree with finite differences") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const RationalObservable f(random_polynomial(rng, 3), random_polynomial(rng, 2) + Polynomial(20));
    const CompiledObservable fc(f);
    const PhasePoint x = random_point(rng);
    for (Var v : {Var::q1, Var::q2, Var::p1, Var::p2}) {
      const double exact = evaluate(differentiate(f, v), x, 1.3);
      CHECK(exact == doctest::Approx(numeric_partial(fc, x, v, 1.3)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("property: Poisson bracket agrees with a numerical bracket") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const RationalObservable f = random_polynomial(rng, 3);
    const RationalObservable g(random_polynomial(rng, 3), Polynomial::variable(Var::q2));
    const CompiledObservable fc(f), gc(g);
    const PhasePoint x = random_point(rng);
    double oracle = 0.0;
    for (auto [q, p] : CanonicalChart::standard().pairs) {
      oracle += numeric_partial(fc, x, q, 0.7) * numeric_partial(gc, x, p, 0.7) -
                numeric_partial(fc, x, p, 0.7) * numeric_partial(gc, x, q, 0.7);
    }
    CHECK(evaluate(poisson_bracket(f, g), x, 0.7) == doctest::Approx(oracle).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("property: compiled and exact evaluation agree") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const RationalObservable f(random_polynomial(rng, 4), random_polynomial(rng, 2) + Polynomial(11));
    const PhasePoint x = random_point(rng);
    CHECK(CompiledObservable(f)(x, 1.7) == doctest::Approx(evaluate(f, x, 1.7)).epsilon(1e-12));
  }
}

TEST_CASE("property: quotient rule and field operations") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 60; ++i) {
    const RationalObservable f = random_polynomial(rng, 2);
    const RationalObservable g = RationalObservable(random_polynomial(rng, 2)) + RationalObservable(9);
    const RationalObservable h = f / g;
    CHECK(h * g == f);
    CHECK(differentiate(h, Var::q1) * g * g == differentiate(f, Var::q1) * g - f * differentiate(g, Var::q1));
    CHECK((h.sign_normalized() == h || h.sign_normalized() == -h));
  }
}
