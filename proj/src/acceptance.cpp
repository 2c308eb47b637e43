#include "dirac/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dirac/constraint_engine.hpp"
#include "dirac/errors.hpp"
#include "dirac/model_systems.hpp"
#include "dirac/quantization.hpp"
#include "dirac/reduced_dynamics.hpp"

namespace dirac {

Polynomial random_polynomial(std::mt19937_64& rng, unsigned max_degree, int max_terms) {
  std::uniform_int_distribution<int> n_terms(1, max_terms);
  std::uniform_int_distribution<int> num(-5, 5);
  std::uniform_int_distribution<int> den(1, 3);
  std::uniform_int_distribution<int> slot_pick(0, static_cast<int>(kSlots) - 1);
  std::uniform_int_distribution<unsigned> degree(0, max_degree);
  Polynomial p;
  const int terms = n_terms(rng);
  for (int t = 0; t < terms; ++t) {
    Exponents e{};
    const unsigned d = degree(rng);
    for (unsigned k = 0; k < d; ++k) {
      // R is picked less often than the chart variables.
      int s = slot_pick(rng);
      if (s == static_cast<int>(kRadiusSlot) && slot_pick(rng) > 1) s = slot_pick(rng) % static_cast<int>(kChartDim);
      ++e[static_cast<std::size_t>(s)];
    }
    int n = 0;
    while (n == 0) n = num(rng);
    mpq_class coeff(n, den(rng));
    coeff.canonicalize();
    p += Polynomial::monomial(e, coeff);
  }
  return p;
}

namespace {

// Collects failures; a criterion passes when nothing was recorded.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failures_.empty(); }
  std::string detail() const {
    std::ostringstream os;
    std::size_t n = 0;
    for (const auto* items : {&failures_, &notes_}) {
      for (const auto& s : *items) os << (n++ ? "; " : "") << s;
    }
    return os.str();
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RationalObservable obs(const char* text) { return parse_observable(text); }

void criterion_1(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto model = build_model({2.0, ModelId::A});
  const auto report = analyze_model(model, 42);
  c.require(report.constraints.size() == 2, "expected exactly two constraints");
  if (report.constraints.size() != 2) return;
  const auto& phi1 = report.constraints[0];
  const auto& phi2 = report.constraints[1];
  c.require(phi1.is_primary() && phi1.expression == obs("p2"), "primary constraint is not p2");
  c.require(phi2.stage == 1, "second constraint is not a first-level secondary");
  // Computed form and the printed form differ by p2^2, which vanishes on p2 = 0.
  c.require(phi2.expression == obs("q1^2 + q2^2 + p1^2 - R^2"), "secondary differs from the computed bracket form");
  SurfaceSampler sampler(2.0, 7);
  const auto printed = obs("q1^2 + q2^2 + p1^2 + p2^2 - R^2");
  c.require(vanishes_on_surface(phi2.expression - printed, report.constraints, sampler),
            "secondary is not on-surface equal to q1^2 + q2^2 + p1^2 + p2^2 - R^2");
  const auto v2 = report.multipliers.find("v2");
  c.require(v2 != report.multipliers.end() && v2->second.is_zero(), "multiplier v2 is not fixed to 0");
  c.require(report.all_second_class(), "constraints are not both second-class");
  const double secs = elapsed(t0);
  c.require(secs < 1.0, "runtime " + sci(secs) + " s exceeds 1 s");
  c.note("phi2 = " + phi2.expression.to_string() + ", v2 = 0, second-class pair, " + sci(secs) + " s");
}

void criterion_2(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto model = build_model({2.0, ModelId::A});
  const auto report = analyze_model(model, 42);
  const DiracBracket db = DiracBracket::from_report(report);
  std::array<RationalObservable, kChartDim> x;
  for (std::size_t i = 0; i < kChartDim; ++i) x[i] = RationalObservable::variable(static_cast<Var>(i));
  const auto expected = [](std::size_t i, std::size_t j) -> RationalObservable {
    // q1=0, q2=1, p1=2, p2=3
    auto pair = [&](std::size_t a, std::size_t b) { return (i == a && j == b) || (i == b && j == a); };
    const int sign = (i < j) ? 1 : -1;
    if (pair(0, 2)) return RationalObservable(sign);
    if (pair(1, 2)) return RationalObservable(sign) * parse_observable("-q1/q2");
    if (pair(0, 1)) return RationalObservable(sign) * parse_observable("-p1/q2");
    return RationalObservable(0);
  };
  int zeros = 0;
  for (std::size_t i = 0; i < kChartDim; ++i) {
    for (std::size_t j = 0; j < kChartDim; ++j) {
      const auto got = db(x[i], x[j]);
      const auto want = expected(i, j);
      c.require(got == want, "{" + std::string(var_name(static_cast<Var>(i))) + "," +
                                 std::string(var_name(static_cast<Var>(j))) + "}_D = " + got.to_string() +
                                 ", expected " + want.to_string());
      zeros += want.is_zero();
    }
  }
  const double secs = elapsed(t0);
  c.require(secs < 1.0, "runtime " + sci(secs) + " s exceeds 1 s");
  c.note("{q1,p1}_D = " + db(x[0], x[2]).to_string() + ", {q2,p1}_D = " + db(x[1], x[2]).to_string() +
         ", {q1,q2}_D = " + db(x[0], x[1]).to_string() + ", " + std::to_string(zeros) +
         " ordered pairs exactly zero, " + sci(secs) + " s");
}

void criterion_3(Check& c) {
  const double r = 2.0;
  const auto model = build_model({r, ModelId::B});
  const auto report = analyze_model(model, 42);
  c.require(report.constraints.size() == 2, "expected exactly two constraints");
  if (report.constraints.size() != 2) return;
  c.require(report.constraints[0].expression == obs("p2"), "chi1 is not p2");
  c.require(report.constraints[1].expression == obs("q1^2 - q2^2 + p1^2 - R^2"), "chi2 differs from the bracket form");
  SurfaceSampler sampler(r, 11);
  c.require(vanishes_on_surface(report.constraints[1].expression - obs("q1^2 - q2^2 + p1^2 + p2^2 - R^2"),
                                report.constraints, sampler),
            "chi2 is not on-surface equal to q1^2 - q2^2 + p1^2 + p2^2 - R^2");
  c.require(report.all_second_class(), "model B constraints are not second-class");
  const auto sys = reduce(model, report, Branch::Positive);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0 * r, 2.0 * r);
  int wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    const double q = u(rng), p = u(rng);
    wrong += sys.in_domain({q, p}) != (q * q + p * p > r * r);
  }
  c.require(wrong == 0, std::to_string(wrong) + " of 1000 points misclassified");
  c.note("chi2 = " + report.constraints[1].expression.to_string() + ", 0/1000 misclassified");
}

void criterion_4(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = analyze_model(build_model({2.0, ModelId::A}), 42);
  const DiracBracket db = DiracBracket::from_report(report);
  std::mt19937_64 rng(2024);
  int count = 0;
  for (int i = 0; i < 100; ++i) {
    const RationalObservable f = random_polynomial(rng, 3);
    const RationalObservable g = random_polynomial(rng, 3);
    const RationalObservable h = random_polynomial(rng, 3);
    using Bracket = std::function<RationalObservable(const RationalObservable&, const RationalObservable&)>;
    const Bracket pb = [](const auto& a, const auto& b) { return poisson_bracket(a, b); };
    const Bracket dbf = [&db](const auto& a, const auto& b) { return db(a, b); };
    for (const auto& [name, br] : {std::pair{"Poisson", pb}, std::pair{"Dirac", dbf}}) {
      const auto fg = br(f, g);
      c.require((fg + br(g, f)).is_zero(), std::string(name) + " antisymmetry failed on triple " + std::to_string(i));
      c.require(br(f * g, h) == f * br(g, h) + g * br(f, h),
                std::string(name) + " Leibniz failed on triple " + std::to_string(i));
      const auto jac = br(f, br(g, h)) + br(g, br(h, f)) + br(h, fg);
      c.require(jac.is_zero(), std::string(name) + " Jacobi failed on triple " + std::to_string(i));
    }
    ++count;
  }
  c.note(std::to_string(count) + " triples, Poisson and Dirac exact, " + sci(elapsed(t0)) + " s");
}

void criterion_5(Check& c) {
  const double r = 2.0;
  const auto model = build_model({r, ModelId::A});
  const auto sys = reduce(model, analyze_model(model, 42), Branch::Positive);
  const PhasePoint2D x0{1.0, 0.0};
  const double period = std::numbers::pi / std::sqrt(3.0);
  IntegratorConfig cfg{1e-3, period, 1};
  const auto rec = integrate_reduced(sys, x0, cfg);
  c.require(rec.status == RunStatus::Completed, "integration did not complete");
  const double dq = std::abs(rec.final_state[0] - 1.0);
  const double dp = std::abs(rec.final_state[1] - 0.0);
  c.require(dq < 1e-6 && dp < 1e-6, "return error (" + sci(dq) + ", " + sci(dp) + ") exceeds 1e-6");
  double drift_r = 0.0, drift_h = 0.0;
  const double r0 = x0.q * x0.q + x0.p * x0.p;
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const auto& s = rec.states[i];
    drift_r = std::max(drift_r, std::abs(s[0] * s[0] + s[1] * s[1] - r0));
    drift_h = std::max(drift_h, std::abs(rec.energy[i] - rec.energy[0]));
  }
  c.require(drift_r < 1e-8, "q^2 + p^2 drift " + sci(drift_r));
  c.require(drift_h < 1e-8, "H drift " + sci(drift_h));

  std::vector<double> errs;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const auto rr = integrate_reduced(sys, x0, {dt, period, 1});
    const auto exact = analytic_solution(sys, x0, rr.final_time);
    errs.push_back(std::hypot(rr.final_state[0] - exact.q, rr.final_state[1] - exact.p));
  }
  const double f1 = errs[0] / errs[1];
  const double f2 = errs[1] / errs[2];
  c.require(f1 >= 12.0 && f1 <= 20.0 && f2 >= 12.0 && f2 <= 20.0,
            "convergence factors " + sci(f1) + ", " + sci(f2) + " outside [12, 20]");
  c.note("return error " + sci(std::max(dq, dp)) + ", drift r^2 " + sci(drift_r) + ", H " + sci(drift_h) +
         ", factors " + sci(f1) + ", " + sci(f2));
}

void criterion_6(Check& c) {
  const double r = 2.0;
  double worst_div = 0.0, worst_res = 0.0;
  for (ModelId id : {ModelId::A, ModelId::B}) {
    const auto model = build_model({r, id});
    const auto report = analyze_model(model, 42);
    const auto sys = reduce(model, report, Branch::Positive);
    const FullSpaceFlow flow(model.hamiltonian.base, report);
    std::mt19937_64 rng(id == ModelId::A ? 101 : 202);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    // Margin > 0.25: r^2 < R^2 - 0.25 (A) or R^2 + 0.25 < r^2 < 4 R^2 (B).
    std::uniform_real_distribution<double> rad2 =
        id == ModelId::A ? std::uniform_real_distribution<double>(0.0, r * r - 0.25)
                         : std::uniform_real_distribution<double>(r * r + 0.25, 4.0 * r * r);
    for (int i = 0; i < 20; ++i) {
      const double rho = std::sqrt(rad2(rng)), a = angle(rng);
      const PhasePoint2D x0{rho * std::cos(a), rho * std::sin(a)};
      const auto cmp = compare_flows(sys, flow, x0, {1e-3, 5.0, 1});
      c.require(cmp.reduced.status == RunStatus::Completed && cmp.full.status == RunStatus::Completed,
                "a run stopped early");
      worst_div = std::max(worst_div, cmp.max_divergence);
      worst_res = std::max(worst_res, cmp.max_residual);
    }
  }
  c.require(worst_div < 1e-6, "max divergence " + sci(worst_div));
  c.require(worst_res < 1e-8, "max constraint residual " + sci(worst_res));
  c.note("max divergence " + sci(worst_div) + ", max residual " + sci(worst_res) + " over 40 runs");
}

void criterion_7(Check& c) {
  const QuantizationParams params{1.0, 2.0, ModelId::A};
  const auto rep = quantize(params, BasisSpec::number(10));
  c.require(rep.physical_dimension == 2, "physical dimension " + std::to_string(rep.physical_dimension));
  const std::vector<double> want{2.0 * std::sqrt(3.0), 2.0 / 3.0};
  for (std::size_t i = 0; i < want.size() && i < rep.eigenvalues.size(); ++i) {
    c.require(std::abs(rep.eigenvalues[i] - want[i]) < 1e-10,
              "eigenvalue " + std::to_string(rep.eigenvalues[i]) + " vs " + std::to_string(want[i]));
  }
  for (double e : rep.eigenvalues) c.require(e >= 0.0, "negative reported eigenvalue");
  c.require(rep.physical_dimension + rep.discarded_count() == rep.basis.dimension(), "dimension bookkeeping");
  c.note("dimension 2, eigenvalues " + sci(rep.eigenvalues.at(0)) + ", " + sci(rep.eigenvalues.at(1)));
}

void criterion_8(Check& c) {
  const QuantizationParams params{1.0, 2.0, ModelId::B};
  const auto num = quantize(params, BasisSpec::number(40));
  const double lowest_num = num.lowest();
  c.require(std::abs(lowest_num - 2.0 / 3.0) < 1e-10, "number-basis lowest " + sci(lowest_num) + " vs 2/3");

  const auto grid = quantize(params, BasisSpec::grid(params, 400, 8.0));
  const double rel = std::abs(grid.lowest() - lowest_num) / lowest_num;
  c.require(rel < 0.02, "grid lowest " + sci(grid.lowest()) + " differs from number basis " + sci(lowest_num) +
                            " by " + sci(100.0 * rel) + "% (limit 2%)");

  const auto study = grid_convergence_study(params, {100, 200, 400, 800}, 1, 8.0, 40);
  const double slope = study.observed_order.empty() ? 0.0 : study.observed_order[0];
  c.require(slope >= 1.7 && slope <= 2.3, "observed order " + sci(slope) + " outside [1.7, 2.3]");
  const double saturated = study.rows.back().error_vs_number.empty() ? 0.0 : study.rows.back().error_vs_number[0];
  c.note("number lowest " + sci(lowest_num) + ", grid lowest " + sci(grid.lowest()) + ", observed order " +
         sci(slope) + ", finest-grid gap to number basis " + sci(saturated));
}

void criterion_9(Check& c) {
  const QuantizationParams params{1.0, 2.0, ModelId::A};
  const auto ops = build_operators(BasisSpec::number(40), params);
  const double d = commutator_defect(ops, params);
  c.require(d < 1e-12, "defect " + sci(d));
  c.note("defect " + sci(d));
}

void criterion_10(Check& c) {
  const double r = 2.0;
  const auto model = build_model({r, ModelId::A});
  const auto report = analyze_model(model, 42);
  const auto sys = reduce(model, report, Branch::Positive);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-r, r);
  double worst_sub = 0.0, worst_flip = 0.0;
  int n = 0;
  while (n < 100) {
    const PhasePoint2D x{u(rng), u(rng)};
    if (!sys.in_domain(x)) continue;
    ++n;
    const double oracle = evaluate(model.hamiltonian.base, sys.lift(x), r);
    const double impl = sys.reduced_h(x);
    const double scale = std::max(1.0, std::abs(oracle));
    worst_sub = std::max(worst_sub, std::abs(oracle - impl) / scale);
    worst_flip = std::max(worst_flip, std::abs(impl + sys.printed_h(x)) / scale);
  }
  c.require(worst_sub < 1e-12, "substitution oracle disagreement " + sci(worst_sub));
  c.require(worst_flip < 1e-12, "implemented != -printed, defect " + sci(worst_flip));
  c.require(sys.printed_sign() == -1, "exact sign factor is " + sys.printed_sign().get_str());
  const auto summary = model_summary(model, report, sys);
  c.require(summary.at("sign_discrepancy").get<bool>(), "reduce report does not flag the sign discrepancy");
  c.note("oracle gap " + sci(worst_sub) + ", factor " + sys.printed_sign().get_str() + " exactly, flagged in report");
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream* log) {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"Constraint chain, model A", criterion_1},
      {"Basic Dirac brackets, model A", criterion_2},
      {"Constraint chain and domain, model B", criterion_3},
      {"Bracket axioms (Poisson and Dirac)", criterion_4},
      {"Reduced dynamics oracle", criterion_5},
      {"Full and reduced flow equivalence", criterion_6},
      {"Quantization, model A", criterion_7},
      {"Quantization, model B", criterion_8},
      {"Commutator defect", criterion_9},
      {"Reduced Hamiltonian sign audit", criterion_10},
  };
  std::vector<CriterionResult> results;
  int id = 1;
  for (const auto& [title, fn] : criteria) {
    CriterionResult res{id++, title, false, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      fn(c);
      res.passed = c.ok();
      res.detail = c.detail();
    } catch (const std::exception& e) {
      res.passed = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = elapsed(t0);
    if (log != nullptr) {
      *log << (res.passed ? "[PASS] " : "[FAIL] ") << res.id << ". " << res.title << ": " << res.detail << " ("
           << sci(res.seconds) << " s)\n";
    }
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace dirac
