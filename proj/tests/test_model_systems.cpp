#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "dirac/errors.hpp"
#include "dirac/model_systems.hpp"

using namespace dirac;

namespace {

RationalObservable P(const char* s) { return parse_observable(s); }

struct Fixture {
  SingularLagrangianModel model;
  ConstraintChainReport report;
  ReducedSystem sys;

  Fixture(ModelId id, double radius, Branch b = Branch::Positive)
      : model(build_model({radius, id})), report(analyze_model(model)), sys(reduce(model, report, b)) {}
};

}  // namespace

TEST_CASE("model construction") {
  const auto a = build_model({2.0, ModelId::A});
  CHECK(substitute_radius(RationalObservable(a.potential), 2.0) == P("q2*(q1^2 + q2^2/3 - 4)"));
  const auto b = build_model({2.0, ModelId::B});
  CHECK(substitute_radius(RationalObservable(b.potential), 2.0) == P("q2*(q1^2 - q2^2/3 - 4)"));
  CHECK(a.kinetic == P("1/(4*q2)"));
  CHECK(a.velocity_from_momentum == P("2*q2*p1"));
  CHECK(a.hamiltonian.base == P("q2*p1^2 + q1^2*q2 + q2^3/3 - q2*R^2"));
  REQUIRE(a.primaries().size() == 1);
  CHECK(a.primaries()[0].expression == P("p2"));
  CHECK(a.hamiltonian.multipliers.at(0).symbol == "v2");
  CHECK(a.label_prefix == "phi");
  CHECK(b.label_prefix == "chi");
  CHECK_THROWS_AS(build_model({-1.0, ModelId::A}), InvalidInput);
  CHECK_THROWS_AS(build_model({0.0, ModelId::A}), InvalidInput);
  CHECK_THROWS_AS(build_model({std::nan(""), ModelId::B}), InvalidInput);
}

TEST_CASE("Legendre transform inverts the momentum relation") {
  const auto data = legendre_transform(P("1/(4*q2)"), P("q2").numerator(), "phi");
  // p1 = dL/dqdot1 = qdot1 / (2 q2); substituting qdot1 back returns p1.
  CHECK(data.velocity_from_momentum / P("2*q2") == P("p1"));
  CHECK(data.hamiltonian == P("q2*p1^2 + q2"));
  CHECK_THROWS_AS(legendre_transform(RationalObservable(0), Polynomial(1), "x"), InvalidInput);
}

TEST_CASE("parsing identifiers") {
  CHECK(parse_model_id("a") == ModelId::A);
  CHECK(parse_model_id("B") == ModelId::B);
  CHECK_THROWS_AS(parse_model_id("c"), InvalidInput);
  CHECK(parse_branch("+") == Branch::Positive);
  CHECK(parse_branch("neg") == Branch::Negative);
  CHECK_THROWS_AS(parse_branch("0"), InvalidInput);
}

TEST_CASE("model A reduction") {
  Fixture f(ModelId::A, 2.0);
  CHECK(f.sys.q2_of_state({0, 0}) == doctest::Approx(2.0));
  CHECK(f.sys.reduced_h({0, 0}) == doctest::Approx(-16.0 / 3.0).epsilon(1e-14));
  CHECK(f.sys.printed_h({0, 0}) == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
  CHECK(f.sys.printed_sign() == -1);
  CHECK(f.sys.sign_discrepancy());
  CHECK(std::abs(f.sys.reduced_h({1.999999, 0.0})) < 1e-7);
  CHECK(f.sys.domain_text() == "q^2 + p^2 < R^2");
  CHECK(f.sys.in_domain({1.0, 1.0}));
  CHECK_FALSE(f.sys.in_domain({2.0, 0.0}));
  CHECK_FALSE(f.sys.in_domain({1.9, 0.9}));
  CHECK_THROWS_AS(f.sys.q2_of_state({3, 0}), OutsideDomain);
  CHECK_THROWS_AS(f.sys.reduced_h({2, 0}), OutsideDomain);
  const auto lifted = f.sys.lift({1, 0});
  CHECK(lifted[slot(Var::q2)] == doctest::Approx(std::sqrt(3.0)));
  CHECK(lifted[slot(Var::p2)] == 0.0);
}

TEST_CASE("model A negative branch agrees with the printed form") {
  Fixture f(ModelId::A, 2.0, Branch::Negative);
  CHECK(f.sys.q2_of_state({0, 0}) == doctest::Approx(-2.0));
  CHECK(f.sys.printed_sign() == 1);
  CHECK_FALSE(f.sys.sign_discrepancy());
  CHECK(f.sys.reduced_h({0.5, 0.5}) == doctest::Approx(f.sys.printed_h({0.5, 0.5})));
}

TEST_CASE("model B reduction") {
  Fixture f(ModelId::B, 2.0);
  CHECK(f.sys.q2_of_state({0, 3}) == doctest::Approx(std::sqrt(5.0)));
  CHECK(f.sys.reduced_h({0, 3}) == doctest::Approx(2.0 / 3.0 * std::pow(5.0, 1.5)).epsilon(1e-14));
  CHECK(f.sys.reduced_h({0, 3}) == doctest::Approx(7.4536).epsilon(1e-5));
  CHECK_FALSE(f.sys.sign_discrepancy());
  CHECK(f.sys.domain_text() == "q^2 + p^2 > R^2");
  CHECK_FALSE(f.sys.in_domain({0.0, 0.0}));
  CHECK(f.sys.in_domain({3.0, 0.0}));
}

TEST_CASE("vector field examples") {
  Fixture a(ModelId::A, 2.0);
  auto v = reduced_vector_field(a.sys, {1, 0});
  CHECK(v.dq == doctest::Approx(0.0));
  CHECK(v.dp == doctest::Approx(-2.0 * std::sqrt(3.0)));
  v = reduced_vector_field(a.sys, {0, 0});
  CHECK(v.dq == 0.0);
  CHECK(v.dp == 0.0);
  Fixture b(ModelId::B, 2.0);
  v = reduced_vector_field(b.sys, {3, 0});
  CHECK(v.dq == doctest::Approx(0.0));
  CHECK(v.dp == doctest::Approx(-6.0 * std::sqrt(5.0)));
  CHECK_THROWS_AS(reduced_vector_field(b.sys, {1, 0}), OutsideDomain);
}

TEST_CASE("analytic solution") {
  Fixture a(ModelId::A, 2.0);
  const double period = std::numbers::pi / std::sqrt(3.0);
  CHECK(angular_rate(a.sys, {1, 0}) == doctest::Approx(2.0 * std::sqrt(3.0)));
  auto x = analytic_solution(a.sys, {1, 0}, period / 4);
  CHECK(x.q == doctest::Approx(0.0).scale(1.0));
  CHECK(x.p == doctest::Approx(-1.0));
  x = analytic_solution(a.sys, {1, 0}, period);
  CHECK(x.q == doctest::Approx(1.0));
  CHECK(x.p == doctest::Approx(0.0).scale(1.0));
  x = analytic_solution(a.sys, {0, 0}, 3.7);
  CHECK(x.q == 0.0);
  CHECK(x.p == 0.0);
  CHECK_THROWS_AS(analytic_solution(a.sys, {3, 0}, 1.0), OutsideDomain);
}

TEST_CASE("property: reduced H equals the base Hamiltonian at the lifted point") {
  for (ModelId id : {ModelId::A, ModelId::B}) {
    for (Branch br : {Branch::Positive, Branch::Negative}) {
      Fixture f(id, 1.5, br);
      std::mt19937_64 rng(21);
      std::uniform_real_distribution<double> u(-3.0, 3.0);
      int n = 0;
      while (n < 100) {
        const PhasePoint2D x{u(rng), u(rng)};
        if (!f.sys.in_domain(x)) continue;
        ++n;
        const double oracle = evaluate(f.model.hamiltonian.base, f.sys.lift(x), 1.5);
        CHECK(f.sys.reduced_h(x) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(f.sys.reduced_h(x) ==
              doctest::Approx(f.sys.printed_sign().get_d() * f.sys.printed_h(x)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: vector field is Hamiltonian and rotational") {
  Fixture f(ModelId::B, 2.0);
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int n = 0;
  while (n < 100) {
    const PhasePoint2D x{u(rng), u(rng)};
    if (f.sys.domain_margin(x) < 0.1) continue;
    ++n;
    const auto v = reduced_vector_field(f.sys, x);
    const auto g = f.sys.gradient(x);
    CHECK(v.dq == doctest::Approx(g.dp).epsilon(1e-10));
    CHECK(v.dp == doctest::Approx(-g.dq).epsilon(1e-10));
    // Tangent to circles about the origin.
    CHECK(x.q * v.dq + x.p * v.dp == doctest::Approx(0.0).scale(std::hypot(v.dq, v.dp)));
  }
}

TEST_CASE("reduction preconditions") {
  const auto model = build_model({2.0, ModelId::A});
  SurfaceSampler s(2.0, 1);
  const auto first_class = run_dirac_algorithm(P("p1^2"), {make_constraint(P("p2"), 0, "phi1")}, s);
  CHECK_THROWS_AS(reduce(model, first_class, Branch::Positive), ReductionUnsupported);
}

TEST_CASE("summary JSON flags the sign") {
  Fixture a(ModelId::A, 2.0);
  const auto j = model_summary(a.model, a.report, a.sys);
  CHECK(j["sign_discrepancy"] == true);
  CHECK(j["printed_sign_factor"] == "-1");
  CHECK(j["domain"] == "q^2 + p^2 < R^2");
  Fixture b(ModelId::B, 2.0);
  CHECK(model_summary(b.model, b.report, b.sys)["sign_discrepancy"] == false);
}
