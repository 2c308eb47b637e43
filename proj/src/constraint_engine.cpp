#include "dirac/constraint_engine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "dirac/errors.hpp"

namespace dirac {

Constraint make_constraint(RationalObservable expression, int stage, std::string label) {
  if (expression.is_zero()) throw InvalidInput("constraint '" + label + "' is identically zero");
  if (stage < 0) throw InvalidInput("constraint stage must be non-negative");
  return Constraint{std::move(expression), stage, std::move(label)};
}

TotalHamiltonian TotalHamiltonian::from_primaries(RationalObservable base, std::vector<Constraint> primaries,
                                                  std::vector<std::string> symbols) {
  if (!symbols.empty() && symbols.size() != primaries.size()) {
    throw InvalidInput("one multiplier symbol per primary constraint is required");
  }
  TotalHamiltonian h{std::move(base), {}};
  for (std::size_t i = 0; i < primaries.size(); ++i) {
    if (!primaries[i].is_primary()) throw InvalidInput("multiplier terms take primary constraints only");
    std::string sym = symbols.empty() ? "v" + std::to_string(i + 1) : symbols[i];
    h.multipliers.push_back({std::move(primaries[i]), std::move(sym)});
  }
  return h;
}

bool ConstraintMatrix::is_antisymmetric() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (!(entries[i][j] + entries[j][i]).is_zero()) return false;
    }
  }
  return true;
}

ConstraintMatrix constraint_matrix(std::span<const Constraint> constraints) {
  const std::size_t n = constraints.size();
  ConstraintMatrix c{RationalMatrix(n, std::vector<RationalObservable>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      c.entries[i][j] = poisson_bracket(constraints[i].expression, constraints[j].expression);
      c.entries[j][i] = -c.entries[i][j];
    }
  }
  return c;
}

RationalMatrix invert_c_matrix(const ConstraintMatrix& c) {
  const std::size_t n = c.size();
  for (const auto& row : c.entries) {
    if (row.size() != n) throw InvalidInput("C matrix is not square");
  }
  if (n == 2) {
    // [[a, b], [c, d]]^-1 = [[d, -b], [-c, a]] / (ad - bc)
    const auto& e = c.entries;
    const RationalObservable det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
    if (det.is_zero()) throw SingularCMatrix("C matrix determinant vanishes identically");
    return {{e[1][1] / det, -e[0][1] / det}, {-e[1][0] / det, e[0][0] / det}};
  }

  // Gauss-Jordan over the rational-function field; exact zero tests only.
  RationalMatrix a = c.entries;
  RationalMatrix inv(n, std::vector<RationalObservable>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = RationalObservable(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col].is_zero()) ++pivot;
    if (pivot == n) throw SingularCMatrix("C matrix is singular as a rational-function matrix");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const RationalObservable p = a[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col][k] /= p;
      inv[col][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      const RationalObservable f = a[r][col];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

namespace {

constexpr double kSampleResidual = 1e-12;
constexpr double kSampleMinAbsQ2 = 1e-3;
constexpr int kNewtonIterations = 60;

}  // namespace

SurfaceSampler::SurfaceSampler(double radius, std::uint64_t seed, std::size_t count)
    : radius_(radius), seed_(seed), count_(count), rng_(seed) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InvalidInput("sampler radius must be finite and >= 0");
  if (count == 0) throw InvalidInput("sampler count must be positive");
}

std::optional<PhasePoint> SurfaceSampler::project(
    PhasePoint x, std::span<const CompiledObservable> phi,
    std::span<const std::array<CompiledObservable, kChartDim>> grad) const {
  const auto m = static_cast<Eigen::Index>(phi.size());
  Eigen::VectorXd r(m);
  Eigen::MatrixXd jac(m, static_cast<Eigen::Index>(kChartDim));
  try {
    for (int it = 0; it < kNewtonIterations; ++it) {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        r(i) = phi[i](x, radius_);
        worst = std::max(worst, std::abs(r(i)));
      }
      if (!std::isfinite(worst)) return std::nullopt;
      if (worst < kSampleResidual) return x;
      for (Eigen::Index i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < kChartDim; ++k) jac(i, static_cast<Eigen::Index>(k)) = grad[i][k](x, radius_);
      }
      // Minimum-norm Gauss-Newton step onto the zero set.
      const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(r);
      if (!step.allFinite()) return std::nullopt;
      for (std::size_t k = 0; k < kChartDim; ++k) x[k] -= step(static_cast<Eigen::Index>(k));
    }
  } catch (const DenominatorVanishes&) {
    return std::nullopt;
  }
  return std::nullopt;
}

std::vector<PhasePoint> SurfaceSampler::sample(std::span<const Constraint> constraints) {
  std::vector<CompiledObservable> phi;
  std::vector<std::array<CompiledObservable, kChartDim>> grad;
  for (const auto& c : constraints) {
    phi.emplace_back(c.expression);
    std::array<CompiledObservable, kChartDim> g;
    for (std::size_t k = 0; k < kChartDim; ++k) {
      g[k] = CompiledObservable(differentiate(c.expression, static_cast<Var>(k)));
    }
    grad.push_back(std::move(g));
  }

  const double box = 2.0 * std::max(radius_, 1.0);
  std::uniform_real_distribution<double> coord(-box, box);
  std::vector<PhasePoint> out;
  const std::size_t max_attempts = 200 * count_;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count_; ++attempt) {
    PhasePoint x;
    for (auto& v : x) v = coord(rng_);
    auto y = project(x, phi, grad);
    if (!y) continue;
    if (std::abs((*y)[slot(Var::q2)]) < kSampleMinAbsQ2) continue;
    out.push_back(*y);
  }
  if (out.size() < count_) {
    throw SamplerExhausted("could only place " + std::to_string(out.size()) + " of " + std::to_string(count_) +
                           " points on the constraint surface");
  }
  return out;
}

bool vanishes_on_surface(const RationalObservable& f, std::span<const Constraint> constraints,
                         SurfaceSampler& sampler) {
  if (f.is_zero()) return true;
  for (const auto& x : sampler.sample(constraints)) {
    if (!(std::abs(evaluate(f, x, sampler.radius())) < kSurfaceTolerance)) return false;
  }
  return true;
}

std::string_view to_string(Disposition d) {
  switch (d) {
    case Disposition::VanishesOnSurface:
      return "vanishes on surface";
    case Disposition::NewConstraint:
      return "new constraint";
    case Disposition::FixesMultiplier:
      return "fixes multiplier";
  }
  return "?";
}

std::string_view to_string(ConstraintClass c) {
  return c == ConstraintClass::FirstClass ? "first-class" : "second-class";
}

bool ConstraintChainReport::all_second_class() const {
  return !classification.empty() && std::all_of(classification.begin(), classification.end(),
                                                [](auto c) { return c == ConstraintClass::SecondClass; });
}

const Constraint& ConstraintChainReport::find(std::string_view label) const {
  for (const auto& c : constraints) {
    if (c.label == label) return c;
  }
  throw InvalidInput("no constraint labelled '" + std::string(label) + "'");
}

namespace {

std::size_t numeric_rank(const ConstraintMatrix& c, std::span<const PhasePoint> points, double radius) {
  const auto n = static_cast<Eigen::Index>(c.size());
  if (n == 0) return 0;
  std::vector<std::vector<CompiledObservable>> compiled(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (const auto& e : c.entries[i]) compiled[i].emplace_back(e);
  }
  std::size_t rank = 0;
  Eigen::MatrixXd m(n, n);
  for (const auto& x : points) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = compiled[i][j](x, radius);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(kSurfaceTolerance);
    rank = std::max(rank, static_cast<std::size_t>(lu.rank()));
  }
  return rank;
}

}  // namespace

ConstraintChainReport run_dirac_algorithm(const TotalHamiltonian& h, SurfaceSampler& sampler,
                                          const DiracOptions& options) {
  if (h.multipliers.empty()) throw InvalidInput("at least one primary constraint is required");

  ConstraintChainReport report;
  report.hamiltonian = h;
  report.radius = sampler.radius();
  report.seed = sampler.seed();
  report.surface_points = sampler.count();

  for (std::size_t i = 0; i < h.multipliers.size(); ++i) {
    Constraint c = h.multipliers[i].constraint;
    if (c.label.empty()) c.label = options.label_prefix + std::to_string(i + 1);
    report.constraints.push_back(std::move(c));
  }

  std::vector<std::size_t> pending(report.constraints.size());
  for (std::size_t i = 0; i < pending.size(); ++i) pending[i] = i;

  while (!pending.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t idx : pending) {
      const Constraint phi = report.constraints[idx];
      ConsistencyStep step;
      step.constraint_label = phi.label;
      step.level = phi.stage;

      RationalObservable b = poisson_bracket(phi.expression, h.base);
      std::vector<std::pair<std::string, RationalObservable>> open;
      for (const auto& term : h.multipliers) {
        RationalObservable a = poisson_bracket(phi.expression, term.constraint.expression);
        if (auto it = report.multipliers.find(term.symbol); it != report.multipliers.end()) {
          b += a * it->second;
        } else {
          open.emplace_back(term.symbol, std::move(a));
        }
      }
      step.bracket = b;
      step.multiplier_coefficients = open;

      std::vector<std::pair<std::string, RationalObservable>> active;
      for (auto& [sym, a] : open) {
        if (!vanishes_on_surface(a, report.constraints, sampler)) active.emplace_back(sym, a);
      }

      if (active.size() == 1) {
        const auto& [sym, a] = active.front();
        RationalObservable v = -b / a;
        step.disposition = Disposition::FixesMultiplier;
        step.detail = sym + " = " + v.to_string();
        report.multipliers.emplace(sym, std::move(v));
      } else if (active.size() > 1) {
        throw UndeterminedSystem("consistency of " + phi.label + " involves " + std::to_string(active.size()) +
                                 " multipliers in a single condition");
      } else if (vanishes_on_surface(b, report.constraints, sampler)) {
        step.disposition = Disposition::VanishesOnSurface;
      } else {
        if (b.numerator().is_chart_constant()) {
          throw UndeterminedSystem("consistency of " + phi.label + " requires " + b.to_string() +
                                   " = 0, which no phase-space point satisfies");
        }
        const int stage = phi.stage + 1;
        if (stage > options.max_depth) {
          throw NonTerminating("constraint chain exceeded depth " + std::to_string(options.max_depth));
        }
        std::string label = options.label_prefix + std::to_string(report.constraints.size() + 1);
        step.disposition = Disposition::NewConstraint;
        step.detail = label;
        report.constraints.push_back(make_constraint(b.sign_normalized(), stage, std::move(label)));
        next.push_back(report.constraints.size() - 1);
      }
      report.consistency_log.push_back(std::move(step));
    }
    pending = std::move(next);
  }

  for (const auto& term : h.multipliers) {
    if (!report.multipliers.contains(term.symbol)) report.undetermined_multipliers.push_back(term.symbol);
  }

  report.c_matrix = constraint_matrix(report.constraints);
  try {
    report.c_inverse = invert_c_matrix(report.c_matrix);
  } catch (const SingularCMatrix&) {
    report.c_inverse.reset();
  }

  const auto points = sampler.sample(report.constraints);
  report.c_rank_on_surface = numeric_rank(report.c_matrix, points, sampler.radius());

  const std::size_t n = report.constraints.size();
  report.classification.assign(n, ConstraintClass::SecondClass);
  if (!report.c_inverse || report.c_rank_on_surface < n) {
    for (std::size_t i = 0; i < n; ++i) {
      bool row_vanishes = true;
      for (std::size_t j = 0; j < n && row_vanishes; ++j) {
        row_vanishes = vanishes_on_surface(report.c_matrix.entries[i][j], report.constraints, sampler);
      }
      if (row_vanishes) report.classification[i] = ConstraintClass::FirstClass;
    }
  }
  return report;
}

ConstraintChainReport run_dirac_algorithm(const RationalObservable& h, std::vector<Constraint> primaries,
                                          SurfaceSampler& sampler, const DiracOptions& options) {
  return run_dirac_algorithm(TotalHamiltonian::from_primaries(h, std::move(primaries)), sampler, options);
}

DiracBracket::DiracBracket(std::vector<Constraint> constraints)
    : DiracBracket(constraints, invert_c_matrix(constraint_matrix(constraints))) {}

DiracBracket::DiracBracket(std::vector<Constraint> constraints, RationalMatrix inverse)
    : constraints_(std::move(constraints)), c_inverse_(std::move(inverse)) {}

DiracBracket DiracBracket::from_report(const ConstraintChainReport& report) {
  if (!report.c_inverse) throw SingularCMatrix("constraint set is not purely second-class");
  return DiracBracket(report.constraints, *report.c_inverse);
}

RationalObservable DiracBracket::operator()(const RationalObservable& f, const RationalObservable& g) const {
  RationalObservable out = poisson_bracket(f, g);
  const std::size_t n = constraints_.size();
  if (n == 0) return out;
  std::vector<RationalObservable> f_phi(n);
  std::vector<RationalObservable> phi_g(n);
  for (std::size_t i = 0; i < n; ++i) {
    f_phi[i] = poisson_bracket(f, constraints_[i].expression);
    phi_g[i] = poisson_bracket(constraints_[i].expression, g);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (f_phi[i].is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (c_inverse_[i][j].is_zero() || phi_g[j].is_zero()) continue;
      out -= f_phi[i] * c_inverse_[i][j] * phi_g[j];
    }
  }
  return out;
}

RationalObservable dirac_bracket(const RationalObservable& f, const RationalObservable& g,
                                 const ConstraintChainReport& report) {
  return DiracBracket::from_report(report)(f, g);
}

namespace {

nlohmann::json matrix_json(const RationalMatrix& m) {
  auto rows = nlohmann::json::array();
  for (const auto& row : m) {
    auto r = nlohmann::json::array();
    for (const auto& e : row) r.push_back(e.to_string());
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const ConstraintChainReport& report) {
  nlohmann::json j;
  j["radius"] = report.radius;
  j["hamiltonian"]["base"] = report.hamiltonian.base.to_string();
  for (const auto& t : report.hamiltonian.multipliers) {
    j["hamiltonian"]["multiplier_terms"].push_back(
        {{"symbol", t.symbol}, {"constraint", t.constraint.expression.to_string()}});
  }
  for (const auto& c : report.constraints) {
    j["constraints"].push_back({{"label", c.label},
                                {"stage", c.is_primary() ? "primary" : "secondary"},
                                {"level", c.stage},
                                {"expression", c.expression.to_string()},
                                {"expression_at_radius", substitute_radius(c.expression, report.radius).to_string()}});
  }
  for (const auto& s : report.consistency_log) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (const auto& [sym, a] : s.multiplier_coefficients) coeffs[sym] = a.to_string();
    j["consistency_log"].push_back({{"constraint", s.constraint_label},
                                    {"level", s.level},
                                    {"bracket_with_hamiltonian", s.bracket.to_string()},
                                    {"multiplier_coefficients", coeffs},
                                    {"disposition", to_string(s.disposition)},
                                    {"detail", s.detail}});
  }
  j["multipliers"] = nlohmann::json::object();
  for (const auto& [sym, v] : report.multipliers) j["multipliers"][sym] = v.to_string();
  j["undetermined_multipliers"] = report.undetermined_multipliers;
  j["c_matrix"] = matrix_json(report.c_matrix.entries);
  j["c_inverse"] = report.c_inverse ? matrix_json(*report.c_inverse) : nlohmann::json(nullptr);
  j["c_rank_on_surface"] = report.c_rank_on_surface;
  for (std::size_t i = 0; i < report.constraints.size(); ++i) {
    j["classification"].push_back(
        {{"label", report.constraints[i].label}, {"class", to_string(report.classification[i])}});
  }
  j["surface_test"] = {{"method", "sampling"},
                       {"heuristic", true},
                       {"points", report.surface_points},
                       {"tolerance", kSurfaceTolerance},
                       {"seed", report.seed}};
  return j;
}

}  // namespace dirac
