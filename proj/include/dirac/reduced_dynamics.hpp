#pragma once

// Fixed-step RK4 integration of the reduced flow and of the full
// Dirac-bracket flow, with energy / constraint / domain monitors.

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dirac/constraint_engine.hpp"
#include "dirac/model_systems.hpp"

namespace dirac {

struct IntegratorConfig {
  double dt = 1e-3;
  double t_max = 1.0;
  int monitor_stride = 1;

  // dt > 0, t_max >= 0, stride >= 1. Throws InvalidInput.
  void validate() const;
  // Steps so that the uniform step t_max / n does not exceed dt.
  std::size_t step_count() const;
  double step() const;
};

enum class RunStatus { Completed, DomainExit, SingularityApproach };

std::string_view to_string(RunStatus s);

struct TrajectoryRecord {
  std::size_t dimension = 2;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<double> energy;
  std::vector<std::vector<double>> residuals;  // |phi_i|, full flow only
  std::vector<double> margin;                  // reduced flow only

  RunStatus status = RunStatus::Completed;
  std::optional<double> exit_time;
  double final_time = 0.0;
  std::vector<double> final_state;

  std::size_t size() const { return times.size(); }
  double max_residual() const;
};

TrajectoryRecord integrate_reduced(const ReducedSystem& sys, PhasePoint2D initial, const IntegratorConfig& cfg);

inline constexpr double kSingularityCutoff = 1e-6;
inline constexpr double kInitialConstraintTolerance = 1e-9;

// x' = {x, H}_D with the brackets {x_i, H}_D precomputed symbolically.
class FullSpaceFlow {
 public:
  FullSpaceFlow(const RationalObservable& hamiltonian, const ConstraintChainReport& report,
                double singularity_cutoff = kSingularityCutoff);

  std::array<double, kChartDim> velocity(const PhasePoint& x) const;
  double energy(const PhasePoint& x) const { return h_(x, radius_); }
  std::vector<double> residuals(const PhasePoint& x) const;

  const RationalObservable& field(Var v) const { return field_[slot(v)]; }
  double radius() const { return radius_; }
  double singularity_cutoff() const { return cutoff_; }
  std::size_t constraint_count() const { return phi_.size(); }

 private:
  double radius_;
  double cutoff_;
  std::array<RationalObservable, kChartDim> field_;
  std::array<CompiledObservable, kChartDim> field_c_;
  CompiledObservable h_;
  std::vector<CompiledObservable> phi_;
};

// Throws ConstraintViolation when the initial point is off the surface.
TrajectoryRecord integrate_full(const FullSpaceFlow& flow, const PhasePoint& initial, const IntegratorConfig& cfg);

struct FlowComparison {
  double max_divergence = 0.0;
  double max_residual = 0.0;
  TrajectoryRecord reduced;
  TrajectoryRecord full;
};

// Lifts the initial state with the branch sign, runs both integrators and
// compares the (q1, p1) projections sample by sample.
FlowComparison compare_flows(const ReducedSystem& sys, const FullSpaceFlow& flow, PhasePoint2D initial,
                             const IntegratorConfig& cfg);

// Header t,q,p,H,margin or t,q1,q2,p1,p2,H,phi1,...; 17 significant digits.
void write_csv(std::ostream& os, const TrajectoryRecord& record);

}  // namespace dirac
