#pragma once

// The two singular Lagrangian systems L = qdot1^2/(4 q2) - V(q), their
// Legendre data, and the branch-resolved reduction to the (q1, p1) plane.

#include <cstdint>
#include <string>
#include <vector>

#include "dirac/constraint_engine.hpp"
#include "dirac/poly_algebra.hpp"
#include "json.hpp"

namespace dirac {

enum class ModelId { A, B };

std::string_view to_string(ModelId m);
// Accepts "a", "A", "b", "B". Throws InvalidInput.
ModelId parse_model_id(std::string_view s);

struct ModelParams {
  double radius = 2.0;
  ModelId model = ModelId::A;

  void validate() const;  // radius finite and > 0
};

// Legendre data of L = kinetic * qdot1^2 - potential with no qdot2 dependence.
struct LegendreData {
  RationalObservable hamiltonian;             // p1^2 / (4 kinetic) + potential
  RationalObservable velocity_from_momentum;  // qdot1 = p1 / (2 kinetic)
  std::vector<Constraint> primaries;          // p2 = 0
};

LegendreData legendre_transform(const RationalObservable& kinetic, const Polynomial& potential,
                                const std::string& label_prefix);

struct SingularLagrangianModel {
  ModelParams params;
  RationalObservable kinetic;  // coefficient of qdot1^2
  Polynomial potential;
  RationalObservable velocity_from_momentum;
  TotalHamiltonian hamiltonian;
  std::string label_prefix;  // "phi" for A, "chi" for B

  std::vector<Constraint> primaries() const;
};

SingularLagrangianModel build_model(const ModelParams& params);

// Runs the constraint algorithm on a model with a seeded surface sampler.
ConstraintChainReport analyze_model(const SingularLagrangianModel& model, std::uint64_t seed = 42);

enum class Branch { Positive = 1, Negative = -1 };

inline int sign_of(Branch b) { return static_cast<int>(b); }
// Accepts "+", "-", "pos", "neg". Throws InvalidInput.
Branch parse_branch(std::string_view s);

struct PhasePoint2D {
  double q = 0.0;
  double p = 0.0;
};

struct Velocity2D {
  double dq = 0.0;
  double dp = 0.0;
};

// Phase space after eliminating p2 (primary) and q2 (branch root of the
// secondary constraint). On the surface q2^2 = s(q, p); the domain is s > 0.
class ReducedSystem {
 public:
  ModelId model() const { return model_; }
  double radius() const { return radius_; }
  Branch branch() const { return branch_; }

  double domain_margin(PhasePoint2D x) const;
  bool in_domain(PhasePoint2D x) const { return domain_margin(x) > 0.0; }

  // Branch-signed sqrt of the margin. Throws OutsideDomain.
  double q2_of_state(PhasePoint2D x) const;
  // Full phase point (q, q2(x), p, 0) on the constraint surface.
  PhasePoint lift(PhasePoint2D x) const;

  // Base Hamiltonian with both eliminations substituted. Throws OutsideDomain.
  double reduced_h(PhasePoint2D x) const;
  // (dH/dq, dH/dp) of reduced_h. Throws OutsideDomain.
  Velocity2D gradient(PhasePoint2D x) const;

  // The closed form (2/3) |margin|^{3/2} as printed for both systems.
  double printed_h(PhasePoint2D x) const;
  // reduced_h / printed_h as an exact constant (+1 or -1 for these systems).
  const mpq_class& printed_sign() const { return printed_sign_; }
  bool sign_discrepancy() const { return printed_sign_ != 1; }

  const Polynomial& margin_polynomial() const { return margin_; }
  const std::string& reduced_h_text() const { return reduced_h_text_; }
  const std::string& printed_h_text() const { return printed_h_text_; }
  std::string domain_text() const;
  std::string domain_description() const;

  // Hamilton's equations of the unreduced H at the lifted point:
  // (dH/dp1, -dH/dq1). Throws OutsideDomain.
  Velocity2D vector_field(PhasePoint2D x) const;

 private:
  friend ReducedSystem reduce(const SingularLagrangianModel&, const ConstraintChainReport&, Branch);

  void require_domain(PhasePoint2D x) const;
  std::array<double, kSlots> slots(PhasePoint2D x) const;

  ModelId model_ = ModelId::A;
  double radius_ = 0.0;
  Branch branch_ = Branch::Positive;
  Var coordinate_ = Var::q1;
  Var momentum_ = Var::p1;
  Var eliminated_coordinate_ = Var::q2;
  Var eliminated_momentum_ = Var::p2;

  Polynomial margin_;
  CompiledObservable margin_c_;
  std::array<CompiledObservable, 2> margin_grad_;  // d/dq, d/dp
  // H(p2 = 0) = sum_k h_k(q, p) q2^k
  std::vector<unsigned> powers_;
  std::vector<CompiledObservable> h_coeffs_;
  std::vector<std::array<CompiledObservable, 2>> h_coeffs_grad_;
  CompiledObservable dh_dp_full_;
  CompiledObservable dh_dq_full_;

  mpq_class printed_sign_ = 1;
  std::string reduced_h_text_;
  std::string printed_h_text_;
};

// Eliminates the momentum fixed by a linear primary constraint and its
// conjugate coordinate through the branch root of the secondary constraint.
// Throws BranchInvalid, ReductionUnsupported, or InvalidInput when the
// report is not purely second-class.
ReducedSystem reduce(const SingularLagrangianModel& model, const ConstraintChainReport& report, Branch branch);

// (2 q2 p, -2 q2 q) with q2 carrying the branch sign. Throws OutsideDomain.
Velocity2D reduced_vector_field(const ReducedSystem& sys, PhasePoint2D state);

// Exact flow: rotation of (q, p) at the angular rate read off the vector
// field at the initial state. Throws OutsideDomain.
PhasePoint2D analytic_solution(const ReducedSystem& sys, PhasePoint2D initial, double t);

// Angular rate omega with qdot = omega p, pdot = -omega q.
double angular_rate(const ReducedSystem& sys, PhasePoint2D state);

nlohmann::json model_summary(const SingularLagrangianModel& model, const ConstraintChainReport& report,
                             const ReducedSystem& sys);

}  // namespace dirac
