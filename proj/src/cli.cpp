#include "dirac/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dirac/acceptance.hpp"
#include "dirac/constraint_engine.hpp"
#include "dirac/errors.hpp"
#include "dirac/model_systems.hpp"
#include "dirac/quantization.hpp"
#include "dirac/reduced_dynamics.hpp"
#include "dirac/svg.hpp"

namespace dirac {

namespace {

struct RunConfig {
  std::string model = "a";
  double radius = 2.0;
  std::string branch = "+";
  double hbar = 1.0;
  double dt = 1e-3;
  double t_max = 1.0;
  double q0 = 1.0;
  double p0 = 0.0;
  std::string basis = "number";
  int n_max = 10;
  int grid_points = 400;
  double box_scale = 8.0;
  std::string output;
  std::string plot;
  std::uint64_t seed = 42;
  bool compare_full = false;
  bool study = false;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string output_format(const RunConfig& cfg, const std::string& fallback) {
  const std::string f = cfg.output.empty() ? fallback : cfg.output;
  if (f != "csv" && f != "json") throw InvalidInput("--output must be csv or json");
  return f;
}

SingularLagrangianModel model_from(const RunConfig& cfg) {
  ModelParams params{cfg.radius, parse_model_id(cfg.model)};
  params.validate();
  return build_model(params);
}

// Nonzero {x_i, x_j}_D for i < j in chart order.
std::vector<std::string> basic_brackets(const ConstraintChainReport& report) {
  std::vector<std::string> lines;
  if (!report.c_inverse) return lines;
  const DiracBracket db = DiracBracket::from_report(report);
  for (std::size_t i = 0; i < kChartDim; ++i) {
    for (std::size_t j = i + 1; j < kChartDim; ++j) {
      const Var a = static_cast<Var>(i), b = static_cast<Var>(j);
      const auto v = db(RationalObservable::variable(a), RationalObservable::variable(b));
      if (v.is_zero()) continue;
      lines.push_back("{" + std::string(var_name(a)) + "," + std::string(var_name(b)) + "}_D = " + v.to_string());
    }
  }
  return lines;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = model_from(cfg);
  output_format(cfg, "json");
  const auto report = analyze_model(model, cfg.seed);
  auto j = to_json(report);
  j["model"] = to_string(model.params.model);
  const auto brackets = basic_brackets(report);
  j["dirac_brackets"] = brackets;
  out << j.dump(2) << '\n';

  err << "model " << to_string(model.params.model) << ", R = " << num(cfg.radius) << "\n";
  err << "H = " << report.hamiltonian.base.to_string() << "\n";
  err << "constraints:\n";
  for (std::size_t i = 0; i < report.constraints.size(); ++i) {
    const auto& c = report.constraints[i];
    err << "  " << c.label << " = " << c.expression.to_string() << "  ("
        << (c.is_primary() ? "primary" : "secondary") << ", " << to_string(report.classification.at(i)) << ")\n";
  }
  err << "multipliers:\n";
  for (const auto& [sym, v] : report.multipliers) err << "  " << sym << " = " << v.to_string() << "\n";
  for (const auto& sym : report.undetermined_multipliers) err << "  " << sym << " undetermined\n";
  err << "C matrix:\n";
  for (const auto& row : report.c_matrix.entries) {
    err << " ";
    for (const auto& e : row) err << "  " << e.to_string();
    err << "\n";
  }
  err << "Dirac brackets:\n";
  for (const auto& b : brackets) err << "  " << b << "\n";
  return kExitOk;
}

int cmd_reduce(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto model = model_from(cfg);
  const Branch branch = parse_branch(cfg.branch);
  const auto report = analyze_model(model, cfg.seed);
  const auto sys = reduce(model, report, branch);
  if (cfg.output == "json") {
    out << model_summary(model, report, sys).dump(2) << '\n';
    return kExitOk;
  }
  if (!cfg.output.empty() && cfg.output != "csv") throw InvalidInput("--output must be csv or json");
  out << "model: " << to_string(model.params.model) << "\n";
  out << "branch: " << (branch == Branch::Positive ? "+" : "-") << "\n";
  out << "eliminated: p2 = 0, q2^2 = " << sys.margin_polynomial().to_string() << "\n";
  out << "domain: " << sys.domain_text() << "\n";
  out << "domain description: " << sys.domain_description() << "\n";
  out << "reduced H (substitution): " << sys.reduced_h_text() << "\n";
  out << "reduced H (printed form): " << sys.printed_h_text() << "\n";
  if (sys.sign_discrepancy()) {
    out << "sign note: substituting the constraints gives " << sys.printed_sign().get_str()
        << " times the printed form on this branch\n";
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = model_from(cfg);
  const Branch branch = parse_branch(cfg.branch);
  if (output_format(cfg, "csv") != "csv") throw InvalidInput("simulate writes csv only");
  const IntegratorConfig icfg{cfg.dt, cfg.t_max, 1};
  icfg.validate();
  const auto report = analyze_model(model, cfg.seed);
  const auto sys = reduce(model, report, branch);
  const PhasePoint2D x0{cfg.q0, cfg.p0};
  if (!sys.in_domain(x0)) {
    char pt[64];
    std::snprintf(pt, sizeof pt, "(%g, %g)", cfg.q0, cfg.p0);
    throw OutsideDomain("initial state " + std::string(pt) + " is outside " + sys.domain_text());
  }

  std::optional<FlowComparison> cmp;
  TrajectoryRecord rec;
  if (cfg.compare_full) {
    const FullSpaceFlow flow(model.hamiltonian.base, report);
    cmp = compare_flows(sys, flow, x0, icfg);
    rec = cmp->reduced;
  } else {
    rec = integrate_reduced(sys, x0, icfg);
  }
  write_csv(out, rec);
  if (cmp) {
    out << "# max_divergence," << num(cmp->max_divergence) << "\n";
    out << "# max_constraint_residual," << num(cmp->max_residual) << "\n";
  }
  if (!cfg.plot.empty()) {
    std::ofstream svg(cfg.plot);
    if (!svg) throw InvalidInput("cannot write plot file " + cfg.plot);
    svg << phase_portrait_svg(rec, cfg.radius,
                              "model " + std::string(to_string(model.params.model)) + ", R = " + num(cfg.radius));
  }
  if (rec.status == RunStatus::DomainExit) {
    err << "domain exit at t = " << num(rec.exit_time.value_or(rec.final_time)) << "\n";
    return kExitDomainExit;
  }
  return kExitOk;
}

int cmd_quantize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const QuantizationParams params{cfg.hbar, cfg.radius, parse_model_id(cfg.model)};
  params.validate();
  const std::string format = output_format(cfg, "json");
  if (cfg.study) {
    const auto study = grid_convergence_study(params, {100, 200, 400, 800}, 2, cfg.box_scale, 200);
    if (format == "csv") {
      write_csv(out, study);
    } else {
      nlohmann::json j;
      j["number_reference"] = study.number_reference;
      j["observed_order"] = study.observed_order;
      for (const auto& r : study.rows) {
        j["rows"].push_back({{"points", r.points},
                             {"h", r.h},
                             {"lowest", r.lowest},
                             {"error_vs_number", r.error_vs_number},
                             {"successive_change", r.successive_change}});
      }
      out << j.dump(2) << '\n';
    }
    return kExitOk;
  }
  const BasisKind kind = parse_basis_kind(cfg.basis);
  const BasisSpec basis =
      kind == BasisKind::Number ? BasisSpec::number(cfg.n_max) : BasisSpec::grid(params, cfg.grid_points, cfg.box_scale);
  const auto rep = quantize(params, basis);
  if (format == "csv") {
    out << "index,eigenvalue,constraint_eigenvalue\n";
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
      out << i << ',' << num(rep.eigenvalues[i]) << ',' << num(rep.constraint_eigenvalues[i]) << '\n';
    }
  } else {
    out << to_json(rep).dump(2) << '\n';
  }
  err << "physical dimension " << rep.physical_dimension << " of " << basis.dimension();
  if (!rep.eigenvalues.empty()) err << ", lowest eigenvalue " << num(rep.lowest());
  err << "\n";
  return kExitOk;
}

int cmd_verify(std::ostream& out) {
  const auto results = run_acceptance(&out);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return ok ? kExitOk : kExitEngine;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constraint analysis, reduction and quantization of singular Lagrangian systems", "dirac"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_model = [&cfg](CLI::App* s) {
    s->add_option("--model", cfg.model, "a or b");
    s->add_option("--radius", cfg.radius, "radius R");
    s->add_option("--seed", cfg.seed, "surface sampler seed");
    s->add_option("--output", cfg.output, "csv or json");
  };
  auto* analyze = app.add_subcommand("analyze", "run the constraint algorithm");
  add_model(analyze);
  auto* reduce_cmd = app.add_subcommand("reduce", "reduced phase space and Hamiltonian");
  add_model(reduce_cmd);
  reduce_cmd->add_option("--branch", cfg.branch, "+ or -");
  auto* simulate = app.add_subcommand("simulate", "integrate the reduced flow");
  add_model(simulate);
  simulate->add_option("--branch", cfg.branch, "+ or -");
  simulate->add_option("--dt", cfg.dt, "step size");
  simulate->add_option("--tmax", cfg.t_max, "final time");
  simulate->add_option("--q0", cfg.q0, "initial q");
  simulate->add_option("--p0", cfg.p0, "initial p");
  simulate->add_option("--plot", cfg.plot, "SVG phase portrait path");
  simulate->add_flag("--compare-full", cfg.compare_full, "also integrate the full Dirac-bracket flow");
  auto* quantize_cmd = app.add_subcommand("quantize", "spectrum on the physical subspace");
  add_model(quantize_cmd);
  quantize_cmd->add_option("--hbar", cfg.hbar, "Planck constant");
  quantize_cmd->add_option("--basis", cfg.basis, "number or grid");
  quantize_cmd->add_option("--nmax", cfg.n_max, "number basis size");
  quantize_cmd->add_option("--grid-points", cfg.grid_points, "grid points");
  quantize_cmd->add_option("--box-scale", cfg.box_scale, "L/R for model B grids");
  quantize_cmd->add_flag("--study", cfg.study, "grid convergence study");
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(cfg, out, err);
    if (reduce_cmd->parsed()) return cmd_reduce(cfg, out, err);
    if (simulate->parsed()) return cmd_simulate(cfg, out, err);
    if (quantize_cmd->parsed()) return cmd_quantize(cfg, out, err);
    if (verify->parsed()) return cmd_verify(out);
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitEngine;
  }
  return kExitInvalid;
}

}  // namespace dirac
