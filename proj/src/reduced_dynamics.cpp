#include "dirac/reduced_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "dirac/errors.hpp"

namespace dirac {

void IntegratorConfig::validate() const {
  if (!std::isfinite(dt) || !(dt > 0.0)) throw InvalidInput("dt must be a finite positive number");
  if (!std::isfinite(t_max) || t_max < 0.0) throw InvalidInput("t_max must be finite and non-negative");
  if (monitor_stride < 1) throw InvalidInput("monitor stride must be at least 1");
}

std::size_t IntegratorConfig::step_count() const {
  if (t_max == 0.0) return 0;
  // Tolerate t_max that is an integer multiple of dt up to rounding.
  return static_cast<std::size_t>(std::ceil(t_max / dt * (1.0 - 1e-12)));
}

double IntegratorConfig::step() const {
  const std::size_t n = step_count();
  return n == 0 ? dt : t_max / static_cast<double>(n);
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::DomainExit:
      return "domain exit";
    case RunStatus::SingularityApproach:
      return "singularity approach";
  }
  return "?";
}

double TrajectoryRecord::max_residual() const {
  double m = 0.0;
  for (const auto& r : residuals) {
    for (double v : r) m = std::max(m, v);
  }
  return m;
}

namespace {

template <std::size_t N, class Field>
std::array<double, N> rk4_step(const std::array<double, N>& x, double h, const Field& f) {
  auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
    std::array<double, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const auto k1 = f(x);
  const auto k2 = f(axpy(x, 0.5 * h, k1));
  const auto k3 = f(axpy(x, 0.5 * h, k2));
  const auto k4 = f(axpy(x, h, k3));
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

TrajectoryRecord integrate_reduced(const ReducedSystem& sys, PhasePoint2D initial, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!sys.in_domain(initial)) {
    throw OutsideDomain("initial state lies outside the open domain " + sys.domain_text());
  }
  const std::size_t n = cfg.step_count();
  const double h = cfg.step();
  const auto field = [&sys](const std::array<double, 2>& x) {
    const Velocity2D v = sys.vector_field({x[0], x[1]});
    return std::array<double, 2>{v.dq, v.dp};
  };

  TrajectoryRecord rec;
  rec.dimension = 2;
  auto record = [&rec, &sys](double t, const std::array<double, 2>& x) {
    rec.times.push_back(t);
    rec.states.push_back({x[0], x[1]});
    rec.energy.push_back(sys.reduced_h({x[0], x[1]}));
    rec.margin.push_back(sys.domain_margin({x[0], x[1]}));
  };

  std::array<double, 2> x{initial.q, initial.p};
  record(0.0, x);
  double t = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    std::array<double, 2> next;
    try {
      next = rk4_step(x, h, field);
    } catch (const OutsideDomain&) {
      rec.status = RunStatus::DomainExit;
      rec.exit_time = t;
      break;
    }
    if (!sys.in_domain({next[0], next[1]})) {
      rec.status = RunStatus::DomainExit;
      rec.exit_time = static_cast<double>(k) * h;
      break;
    }
    x = next;
    t = static_cast<double>(k) * h;
    if (k % static_cast<std::size_t>(cfg.monitor_stride) == 0) record(t, x);
  }
  rec.final_time = t;
  rec.final_state = {x[0], x[1]};
  return rec;
}

FullSpaceFlow::FullSpaceFlow(const RationalObservable& hamiltonian, const ConstraintChainReport& report,
                             double singularity_cutoff)
    : radius_(report.radius), cutoff_(singularity_cutoff), h_(hamiltonian) {
  if (!(singularity_cutoff > 0.0)) throw InvalidInput("singularity cutoff must be positive");
  const DiracBracket bracket = DiracBracket::from_report(report);
  for (std::size_t i = 0; i < kChartDim; ++i) {
    field_[i] = bracket(RationalObservable::variable(static_cast<Var>(i)), hamiltonian);
    field_c_[i] = CompiledObservable(field_[i]);
  }
  for (const auto& c : report.constraints) phi_.emplace_back(c.expression);
}

std::array<double, kChartDim> FullSpaceFlow::velocity(const PhasePoint& x) const {
  std::array<double, kChartDim> v;
  for (std::size_t i = 0; i < kChartDim; ++i) v[i] = field_c_[i](x, radius_);
  return v;
}

std::vector<double> FullSpaceFlow::residuals(const PhasePoint& x) const {
  std::vector<double> r;
  r.reserve(phi_.size());
  for (const auto& phi : phi_) r.push_back(std::abs(phi(x, radius_)));
  return r;
}

TrajectoryRecord integrate_full(const FullSpaceFlow& flow, const PhasePoint& initial, const IntegratorConfig& cfg) {
  cfg.validate();
  for (double r : flow.residuals(initial)) {
    if (!(r < kInitialConstraintTolerance)) {
      throw ConstraintViolation("initial point violates a constraint by " + std::to_string(r));
    }
  }
  const double cutoff = flow.singularity_cutoff();
  const auto near_singular = [cutoff](const PhasePoint& x) { return std::abs(x[slot(Var::q2)]) < cutoff; };

  TrajectoryRecord rec;
  rec.dimension = kChartDim;
  auto record = [&rec, &flow](double t, const PhasePoint& x) {
    rec.times.push_back(t);
    rec.states.emplace_back(x.begin(), x.end());
    rec.energy.push_back(flow.energy(x));
    rec.residuals.push_back(flow.residuals(x));
  };

  PhasePoint x = initial;
  double t = 0.0;
  if (near_singular(x)) {
    rec.status = RunStatus::SingularityApproach;
    rec.exit_time = 0.0;
    rec.final_state.assign(x.begin(), x.end());
    return rec;
  }
  record(0.0, x);
  const std::size_t n = cfg.step_count();
  const double h = cfg.step();
  const auto field = [&flow, &near_singular](const PhasePoint& y) {
    if (near_singular(y)) throw DenominatorVanishes("approached q2 = 0");
    return flow.velocity(y);
  };
  for (std::size_t k = 1; k <= n; ++k) {
    PhasePoint next;
    try {
      next = rk4_step(x, h, field);
    } catch (const DenominatorVanishes&) {
      rec.status = RunStatus::SingularityApproach;
      rec.exit_time = t;
      break;
    }
    x = next;
    t = static_cast<double>(k) * h;
    if (near_singular(x)) {
      rec.status = RunStatus::SingularityApproach;
      rec.exit_time = t;
      break;
    }
    if (k % static_cast<std::size_t>(cfg.monitor_stride) == 0) record(t, x);
  }
  rec.final_time = t;
  rec.final_state.assign(x.begin(), x.end());
  return rec;
}

FlowComparison compare_flows(const ReducedSystem& sys, const FullSpaceFlow& flow, PhasePoint2D initial,
                             const IntegratorConfig& cfg) {
  FlowComparison out;
  out.reduced = integrate_reduced(sys, initial, cfg);
  out.full = integrate_full(flow, sys.lift(initial), cfg);
  const std::size_t n = std::min(out.reduced.size(), out.full.size());
  const std::size_t iq = slot(Var::q1);
  const std::size_t ip = slot(Var::p1);
  for (std::size_t i = 0; i < n; ++i) {
    const double dq = out.reduced.states[i][0] - out.full.states[i][iq];
    const double dp = out.reduced.states[i][1] - out.full.states[i][ip];
    out.max_divergence = std::max(out.max_divergence, std::hypot(dq, dp));
  }
  out.max_residual = out.full.max_residual();
  return out;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_csv(std::ostream& os, const TrajectoryRecord& record) {
  if (record.dimension == 2) {
    os << "t,q,p,H,margin\n";
  } else {
    os << "t,q1,q2,p1,p2,H";
    const std::size_t m = record.residuals.empty() ? 0 : record.residuals.front().size();
    for (std::size_t i = 0; i < m; ++i) os << ",phi" << i + 1;
    os << '\n';
  }
  for (std::size_t i = 0; i < record.size(); ++i) {
    put(os, record.times[i]);
    for (double v : record.states[i]) {
      os << ',';
      put(os, v);
    }
    os << ',';
    put(os, record.energy[i]);
    if (record.dimension == 2) {
      os << ',';
      put(os, record.margin[i]);
    } else {
      for (double r : record.residuals[i]) {
        os << ',';
        put(os, r);
      }
    }
    os << '\n';
  }
}

}  // namespace dirac
