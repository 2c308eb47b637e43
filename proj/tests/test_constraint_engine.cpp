#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dirac/acceptance.hpp"
#include "dirac/constraint_engine.hpp"
#include "dirac/errors.hpp"

using namespace dirac;

namespace {

RationalObservable P(const char* s) { return parse_observable(s); }

const RationalObservable kHamiltonianA = P("q2*p1^2 + q2*(q1^2 + q2^2/3 - R^2)");
const RationalObservable kHamiltonianB = P("q2*p1^2 + q2*(q1^2 - q2^2/3 - R^2)");

ConstraintChainReport chain(const RationalObservable& h, double radius = 2.0, std::uint64_t seed = 42) {
  SurfaceSampler sampler(radius, seed);
  return run_dirac_algorithm(h, {make_constraint(P("p2"), 0, "phi1")}, sampler);
}

}  // namespace

TEST_CASE("model A chain") {
  const auto r = chain(kHamiltonianA);
  REQUIRE(r.constraints.size() == 2);
  CHECK(r.constraints[0].label == "phi1");
  CHECK(r.constraints[1].label == "phi2");
  CHECK(r.constraints[1].stage == 1);
  CHECK(r.constraints[1].expression == P("q1^2 + q2^2 + p1^2 - R^2"));
  CHECK(r.multipliers.at("v1").is_zero());
  CHECK(r.all_second_class());
  CHECK(r.c_rank_on_surface == 2);
  CHECK(r.c_matrix.is_antisymmetric());
  CHECK(r.c_matrix.entries[0][1] == P("-2*q2"));
  REQUIRE(r.consistency_log.size() == 2);
  CHECK(r.consistency_log[0].disposition == Disposition::NewConstraint);
  CHECK(r.consistency_log[1].disposition == Disposition::FixesMultiplier);
  CHECK(&r.find("phi2") == &r.constraints[1]);
  CHECK_THROWS_AS(r.find("phi9"), InvalidInput);
}

TEST_CASE("model B chain") {
  const auto r = chain(kHamiltonianB);
  REQUIRE(r.constraints.size() == 2);
  CHECK(r.constraints[1].expression == P("q1^2 - q2^2 + p1^2 - R^2"));
  CHECK(r.all_second_class());
  REQUIRE(r.c_inverse);
  CHECK((*r.c_inverse)[0][1] == P("-1/(2*q2)"));
  CHECK((*r.c_inverse)[1][0] == P("1/(2*q2)"));
}

TEST_CASE("vanishing bracket stops the chain at the primary") {
  const auto r = chain(P("p1^2"));
  REQUIRE(r.constraints.size() == 1);
  CHECK(poisson_bracket(P("p2"), P("p1^2")).is_zero());
  CHECK(r.consistency_log[0].disposition == Disposition::VanishesOnSurface);
  CHECK(r.classification[0] == ConstraintClass::FirstClass);
  CHECK_FALSE(r.all_second_class());
  CHECK_FALSE(r.c_inverse);
  CHECK(r.undetermined_multipliers == std::vector<std::string>{"v1"});
  CHECK_THROWS_AS(dirac_bracket(P("q1"), P("p1"), r), SingularCMatrix);
}

TEST_CASE("chain errors") {
  SurfaceSampler sampler(2.0, 1);
  CHECK_THROWS_AS(run_dirac_algorithm(kHamiltonianA, {make_constraint(P("p2"), 0, "phi1")}, sampler, {0, "phi"}),
                  NonTerminating);
  // {p1, H} = -(q1 + q2) becomes a constraint whose own condition is v1 + v2.
  const auto h = P("(q1 + q2)^2/2");
  CHECK_THROWS_AS(run_dirac_algorithm(h, {make_constraint(P("p1"), 0, "a"), make_constraint(P("p2"), 0, "b")},
                                      sampler),
                  UndeterminedSystem);
  CHECK_THROWS_AS(run_dirac_algorithm(P("q2"), {make_constraint(P("p2"), 0, "a")}, sampler), UndeterminedSystem);
  CHECK_THROWS_AS(make_constraint(RationalObservable(0), 0, "z"), InvalidInput);
}

TEST_CASE("C matrix inversion") {
  ConstraintMatrix zero{{{0, 0}, {0, 0}}};
  CHECK_THROWS_AS(invert_c_matrix(zero), SingularCMatrix);
  const auto r = chain(kHamiltonianA);
  const auto inv = invert_c_matrix(r.c_matrix);
  CHECK(inv[0][1] == P("1/(2*q2)"));
  CHECK(inv[1][0] == P("-1/(2*q2)"));

  // 4x4 through the general path: canonical pairs (q1,p1), (q2,p2) scaled.
  const std::vector<Constraint> four{make_constraint(P("q1"), 0, "a"), make_constraint(P("p1"), 0, "b"),
                                     make_constraint(P("q2"), 0, "c"), make_constraint(P("2*p2 + q1"), 0, "d")};
  const auto c4 = constraint_matrix(four);
  CHECK(c4.is_antisymmetric());
  const auto inv4 = invert_c_matrix(c4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      RationalObservable s;
      for (std::size_t k = 0; k < 4; ++k) s += c4.entries[i][k] * inv4[k][j];
      CHECK(s == RationalObservable(i == j ? 1 : 0));
    }
  }
}

TEST_CASE("surface sampler") {
  const auto r = chain(kHamiltonianA);
  SurfaceSampler s(2.0, 9);
  const auto pts = s.sample(r.constraints);
  CHECK(pts.size() == 20);
  for (const auto& x : pts) {
    CHECK(std::abs(evaluate(r.constraints[1].expression, x, 2.0)) < 1e-12);
    CHECK(x[slot(Var::p2)] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(x[slot(Var::q2)]) > 1e-3);
  }
  SurfaceSampler again(2.0, 9);
  CHECK(again.sample(r.constraints) == pts);
  // q1^2 + 1 = 0 has no real points.
  SurfaceSampler none(2.0, 1, 3);
  const std::vector<Constraint> impossible{make_constraint(P("q1^2 + 1"), 0, "x")};
  CHECK_THROWS_AS(none.sample(impossible), SamplerExhausted);
}

TEST_CASE("vanishes on surface examples") {
  const auto r = chain(kHamiltonianA);
  SurfaceSampler s(2.0, 5);
  CHECK(vanishes_on_surface(r.constraints[1].expression, r.constraints, s));
  CHECK(vanishes_on_surface(P("q1^2 + q2^2 + p1^2 - R^2"), r.constraints, s));
  CHECK(vanishes_on_surface(P("q1^2 + q2^2 + p1^2 + p2^2 - R^2"), r.constraints, s));
  CHECK_FALSE(vanishes_on_surface(P("q1"), r.constraints, s));
}

TEST_CASE("Dirac brackets of model A") {
  const auto r = chain(kHamiltonianA);
  CHECK(dirac_bracket(P("q1"), P("p1"), r) == RationalObservable(1));
  CHECK(dirac_bracket(P("q2"), P("p1"), r) == P("-q1/q2"));
  CHECK(dirac_bracket(P("q1"), P("q2"), r) == P("-p1/q2"));
  CHECK(dirac_bracket(P("q2"), P("p1"), r).to_string() == "-q1/q2");
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    const RationalObservable f = random_polynomial(rng, 3);
    CHECK(dirac_bracket(P("p2"), f, r).is_zero());
  }
}

TEST_CASE("property: constraints are Casimirs of the Dirac bracket") {
  for (const auto& h : {kHamiltonianA, kHamiltonianB}) {
    const auto r = chain(h);
    const DiracBracket db = DiracBracket::from_report(r);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
      const RationalObservable f = random_polynomial(rng, 3);
      for (const auto& c : r.constraints) CHECK(db(c.expression, f).is_zero());
    }
  }
}

TEST_CASE("property: Dirac bracket axioms on random triples") {
  const auto r = chain(kHamiltonianB);
  const DiracBracket db = DiracBracket::from_report(r);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 30; ++i) {
    const RationalObservable f = random_polynomial(rng, 3), g = random_polynomial(rng, 3),
                             h = random_polynomial(rng, 2);
    CHECK((db(f, g) + db(g, f)).is_zero());
    CHECK(db(f * g, h) == f * db(g, h) + g * db(f, h));
    CHECK((db(f, db(g, h)) + db(g, db(h, f)) + db(h, db(f, g))).is_zero());
  }
}

TEST_CASE("report JSON") {
  const auto r = chain(kHamiltonianA);
  const auto j = to_json(r);
  CHECK(j["constraints"][1]["expression_at_radius"] == "q1^2 + q2^2 + p1^2 - 4");
  CHECK(j["multipliers"]["v1"] == "0");
  CHECK(j["c_matrix"][0][1] == "-2*q2");
  CHECK(j["surface_test"]["heuristic"] == true);
  CHECK(j["classification"][0]["class"] == "second-class");
}
