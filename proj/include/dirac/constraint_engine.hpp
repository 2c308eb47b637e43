#pragma once

// Dirac's constraint algorithm: consistency conditions, secondary
// constraints, multiplier solving, classification and Dirac brackets.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dirac/poly_algebra.hpp"
#include "json.hpp"

namespace dirac {

struct Constraint {
  RationalObservable expression;
  int stage = 0;  // 0 = primary, k = secondary of level k
  std::string label;

  bool is_primary() const { return stage == 0; }
};

// Throws InvalidInput for the identically zero expression.
Constraint make_constraint(RationalObservable expression, int stage, std::string label);

struct MultiplierTerm {
  Constraint constraint;
  std::string symbol;
};

// H_T = base + sum v_i phi_i over primary constraints.
struct TotalHamiltonian {
  RationalObservable base;
  std::vector<MultiplierTerm> multipliers;

  // Symbols default to v1, v2, ... in primary order.
  static TotalHamiltonian from_primaries(RationalObservable base, std::vector<Constraint> primaries,
                                         std::vector<std::string> symbols = {});
};

using RationalMatrix = std::vector<std::vector<RationalObservable>>;

struct ConstraintMatrix {
  RationalMatrix entries;

  std::size_t size() const { return entries.size(); }
  bool is_antisymmetric() const;
};

ConstraintMatrix constraint_matrix(std::span<const Constraint> constraints);

// Exact inverse over the field of rational functions. Throws SingularCMatrix.
RationalMatrix invert_c_matrix(const ConstraintMatrix& c);

// Draws points on the common zero set of a list of constraints. Owns its
// random state; use one sampler per thread.
class SurfaceSampler {
 public:
  SurfaceSampler(double radius, std::uint64_t seed, std::size_t count = 20);

  double radius() const { return radius_; }
  std::size_t count() const { return count_; }
  std::uint64_t seed() const { return seed_; }

  // `count()` points with every |phi| < 1e-12 and |q2| away from zero.
  // Throws SamplerExhausted when the surface cannot be reached.
  std::vector<PhasePoint> sample(std::span<const Constraint> constraints);

 private:
  std::optional<PhasePoint> project(PhasePoint x, std::span<const CompiledObservable> phi,
                                    std::span<const std::array<CompiledObservable, kChartDim>> grad) const;

  double radius_;
  std::uint64_t seed_;
  std::size_t count_;
  std::mt19937_64 rng_;
};

inline constexpr double kSurfaceTolerance = 1e-9;

bool vanishes_on_surface(const RationalObservable& f, std::span<const Constraint> constraints,
                         SurfaceSampler& sampler);

enum class Disposition { VanishesOnSurface, NewConstraint, FixesMultiplier };
enum class ConstraintClass { FirstClass, SecondClass };

std::string_view to_string(Disposition d);
std::string_view to_string(ConstraintClass c);

struct ConsistencyStep {
  std::string constraint_label;
  int level = 0;
  // {phi, H} with already solved multipliers folded in.
  RationalObservable bracket;
  // Coefficient of each still-undetermined multiplier, {phi, phi_primary}.
  std::vector<std::pair<std::string, RationalObservable>> multiplier_coefficients;
  Disposition disposition = Disposition::VanishesOnSurface;
  std::string detail;
};

struct ConstraintChainReport {
  TotalHamiltonian hamiltonian;
  std::vector<Constraint> constraints;
  std::vector<ConsistencyStep> consistency_log;
  std::map<std::string, RationalObservable> multipliers;
  std::vector<std::string> undetermined_multipliers;
  ConstraintMatrix c_matrix;
  std::optional<RationalMatrix> c_inverse;
  std::size_t c_rank_on_surface = 0;
  std::vector<ConstraintClass> classification;
  double radius = 0.0;
  std::uint64_t seed = 0;
  std::size_t surface_points = 0;

  bool all_second_class() const;
  const Constraint& find(std::string_view label) const;
};

struct DiracOptions {
  int max_depth = 10;
  std::string label_prefix = "phi";
};

ConstraintChainReport run_dirac_algorithm(const TotalHamiltonian& h, SurfaceSampler& sampler,
                                          const DiracOptions& options = {});
ConstraintChainReport run_dirac_algorithm(const RationalObservable& h, std::vector<Constraint> primaries,
                                          SurfaceSampler& sampler, const DiracOptions& options = {});

// {f,g}_D = {f,g} - {f,phi_i} (C^-1)_ij {phi_j,g}. Precomputes C^-1 once.
class DiracBracket {
 public:
  explicit DiracBracket(std::vector<Constraint> constraints);
  static DiracBracket from_report(const ConstraintChainReport& report);

  RationalObservable operator()(const RationalObservable& f, const RationalObservable& g) const;

  const std::vector<Constraint>& constraints() const { return constraints_; }
  const RationalMatrix& c_inverse() const { return c_inverse_; }

 private:
  DiracBracket(std::vector<Constraint> constraints, RationalMatrix inverse);

  std::vector<Constraint> constraints_;
  RationalMatrix c_inverse_;
};

// Throws SingularCMatrix when the report carries no invertible C matrix.
RationalObservable dirac_bracket(const RationalObservable& f, const RationalObservable& g,
                                 const ConstraintChainReport& report);

nlohmann::json to_json(const ConstraintChainReport& report);

}  // namespace dirac
