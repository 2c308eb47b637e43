#include "dirac/model_systems.hpp"

#include <cmath>
#include <numbers>

#include "dirac/errors.hpp"

namespace dirac {

std::string_view to_string(ModelId m) { return m == ModelId::A ? "A" : "B"; }

ModelId parse_model_id(std::string_view s) {
  if (s == "a" || s == "A") return ModelId::A;
  if (s == "b" || s == "B") return ModelId::B;
  throw InvalidInput("unknown model '" + std::string(s) + "' (expected a or b)");
}

Branch parse_branch(std::string_view s) {
  if (s == "+" || s == "pos" || s == "positive") return Branch::Positive;
  if (s == "-" || s == "neg" || s == "negative") return Branch::Negative;
  throw InvalidInput("unknown branch '" + std::string(s) + "' (expected + or -)");
}

void ModelParams::validate() const {
  if (!std::isfinite(radius) || !(radius > 0.0)) throw InvalidInput("radius must be a finite positive number");
}

LegendreData legendre_transform(const RationalObservable& kinetic, const Polynomial& potential,
                                const std::string& label_prefix) {
  if (kinetic.is_zero()) throw InvalidInput("kinetic coefficient must not vanish identically");
  const auto p1 = RationalObservable::variable(Var::p1);
  // p1 = 2 k qdot1; the Lagrangian carries no qdot2, hence p2 = 0.
  LegendreData out;
  out.velocity_from_momentum = p1 / (RationalObservable(2) * kinetic);
  out.hamiltonian = p1 * p1 / (RationalObservable(4) * kinetic) + RationalObservable(potential);
  out.primaries.push_back(make_constraint(RationalObservable::variable(Var::p2), 0, label_prefix + "1"));
  return out;
}

std::vector<Constraint> SingularLagrangianModel::primaries() const {
  std::vector<Constraint> out;
  for (const auto& t : hamiltonian.multipliers) out.push_back(t.constraint);
  return out;
}

SingularLagrangianModel build_model(const ModelParams& params) {
  params.validate();
  const Polynomial q1 = Polynomial::variable(Var::q1);
  const Polynomial q2 = Polynomial::variable(Var::q2);
  const Polynomial r = Polynomial::radius();
  // V = q2 (q1^2 +- q2^2/3 - R^2)
  const mpq_class cubic = params.model == ModelId::A ? mpq_class(1, 3) : mpq_class(-1, 3);
  Polynomial bracket = q1 * q1 - r * r;
  bracket += q2 * q2 * Polynomial(cubic);

  SingularLagrangianModel m;
  m.params = params;
  m.kinetic = RationalObservable(Polynomial(1), Polynomial(4) * q2);
  m.potential = q2 * bracket;
  m.label_prefix = params.model == ModelId::A ? "phi" : "chi";

  LegendreData legendre = legendre_transform(m.kinetic, m.potential, m.label_prefix);
  m.velocity_from_momentum = legendre.velocity_from_momentum;
  // The multiplier is named after the momentum it multiplies.
  m.hamiltonian = TotalHamiltonian::from_primaries(legendre.hamiltonian, legendre.primaries, {"v2"});
  return m;
}

ConstraintChainReport analyze_model(const SingularLagrangianModel& model, std::uint64_t seed) {
  SurfaceSampler sampler(model.params.radius, seed);
  DiracOptions opts;
  opts.label_prefix = model.label_prefix;
  return run_dirac_algorithm(model.hamiltonian, sampler, opts);
}

std::array<double, kSlots> ReducedSystem::slots(PhasePoint2D x) const {
  std::array<double, kSlots> v{};
  v[slot(coordinate_)] = x.q;
  v[slot(momentum_)] = x.p;
  v[kRadiusSlot] = radius_;
  return v;
}

namespace {

PhasePoint chart_point(const std::array<double, kSlots>& v) { return {v[0], v[1], v[2], v[3]}; }

std::string rational_prefix(const mpq_class& c) {
  if (c == 1) return "";
  if (c == -1) return "-";
  return c.get_str() + "*";
}

}  // namespace

double ReducedSystem::domain_margin(PhasePoint2D x) const { return margin_c_(chart_point(slots(x)), radius_); }

void ReducedSystem::require_domain(PhasePoint2D x) const {
  const double m = domain_margin(x);
  if (!(m > 0.0)) {
    throw OutsideDomain("state (" + std::to_string(x.q) + ", " + std::to_string(x.p) +
                        ") is outside the open domain " + domain_text() + " (margin " + std::to_string(m) + ")");
  }
}

double ReducedSystem::q2_of_state(PhasePoint2D x) const {
  require_domain(x);
  return sign_of(branch_) * std::sqrt(domain_margin(x));
}

PhasePoint ReducedSystem::lift(PhasePoint2D x) const {
  auto v = slots(x);
  v[slot(eliminated_coordinate_)] = q2_of_state(x);
  v[slot(eliminated_momentum_)] = 0.0;
  return chart_point(v);
}

double ReducedSystem::reduced_h(PhasePoint2D x) const {
  const double z = q2_of_state(x);
  const PhasePoint pt = chart_point(slots(x));
  double h = 0.0;
  for (std::size_t k = 0; k < powers_.size(); ++k) h += h_coeffs_[k](pt, radius_) * std::pow(z, powers_[k]);
  return h;
}

Velocity2D ReducedSystem::gradient(PhasePoint2D x) const {
  const double z = q2_of_state(x);
  const PhasePoint pt = chart_point(slots(x));
  // dz/dv = sign * ds/dv / (2 sqrt(s)) = ds/dv / (2 z)
  const double dz_dq = margin_grad_[0](pt, radius_) / (2.0 * z);
  const double dz_dp = margin_grad_[1](pt, radius_) / (2.0 * z);
  Velocity2D g;
  for (std::size_t k = 0; k < powers_.size(); ++k) {
    const unsigned n = powers_[k];
    const double zn = std::pow(z, n);
    const double dzn = n == 0 ? 0.0 : n * std::pow(z, n - 1);
    const double hk = h_coeffs_[k](pt, radius_);
    g.dq += h_coeffs_grad_[k][0](pt, radius_) * zn + hk * dzn * dz_dq;
    g.dp += h_coeffs_grad_[k][1](pt, radius_) * zn + hk * dzn * dz_dp;
  }
  return g;
}

double ReducedSystem::printed_h(PhasePoint2D x) const {
  require_domain(x);
  return 2.0 / 3.0 * std::pow(domain_margin(x), 1.5);
}

Velocity2D ReducedSystem::vector_field(PhasePoint2D x) const {
  const PhasePoint pt = lift(x);
  return {dh_dp_full_(pt, radius_), -dh_dq_full_(pt, radius_)};
}

namespace {

const Polynomial& disc_margin() {
  static const Polynomial m = parse_observable("R^2 - q1^2 - p1^2").numerator();
  return m;
}

}  // namespace

std::string ReducedSystem::domain_text() const {
  if (margin_ == disc_margin()) return "q^2 + p^2 < R^2";
  if (margin_ == -disc_margin()) return "q^2 + p^2 > R^2";
  return margin_.to_string() + " > 0";
}

std::string ReducedSystem::domain_description() const {
  if (margin_ == disc_margin()) return "open disc of radius R (boundary excluded)";
  if (margin_ == -disc_margin()) return "plane with a hole of radius R (circle excluded)";
  return "open region where the eliminated coordinate is real and nonzero";
}

ReducedSystem reduce(const SingularLagrangianModel& model, const ConstraintChainReport& report, Branch branch) {
  if (!report.all_second_class() || !report.c_inverse) {
    throw ReductionUnsupported("reduction needs a purely second-class constraint set");
  }
  const auto& chart = CanonicalChart::standard();

  // Primary constraint linear in a single momentum: that momentum is zero.
  const Constraint* primary = nullptr;
  Var momentum = Var::p2;
  for (const auto& c : report.constraints) {
    if (!c.is_primary() || !c.expression.is_polynomial() || c.expression.numerator().size() != 1) continue;
    for (const auto& [q, p] : chart.pairs) {
      if (c.expression.numerator().total_degree() == 1 && c.expression.numerator().degree_in(slot(p)) == 1) {
        primary = &c;
        momentum = p;
      }
    }
  }
  if (primary == nullptr || report.constraints.size() != 2) {
    throw ReductionUnsupported("expected one primary p_k = 0 and one secondary constraint");
  }
  const Var coordinate = chart.conjugate(momentum);
  const Constraint& secondary = report.constraints[&report.constraints[0] == primary ? 1 : 0];
  if (!secondary.expression.is_polynomial()) throw ReductionUnsupported("secondary constraint must be polynomial");

  // Secondary at p_k = 0 must read c2 q_k^2 + c0 with constant c2.
  const mpq_class inv_den = 1 / secondary.expression.denominator().leading_coefficient();
  Polynomial sec = secondary.expression.numerator().substitute(slot(momentum), 0);
  sec *= inv_den;
  const auto parts = sec.collect(slot(coordinate));
  if (parts.size() != 2 || !parts.contains(0) || !parts.contains(2) || !parts.at(2).is_constant()) {
    throw ReductionUnsupported("secondary constraint is not of the form c q^2 + f(q', p')");
  }
  const mpq_class c2 = parts.at(2).leading_coefficient();
  Polynomial margin = parts.at(0);
  margin *= mpq_class(-1 / c2);

  ReducedSystem sys;
  sys.model_ = model.params.model;
  sys.radius_ = model.params.radius;
  sys.branch_ = branch;
  sys.eliminated_coordinate_ = coordinate;
  sys.eliminated_momentum_ = momentum;
  for (const auto& [q, p] : chart.pairs) {
    if (q != coordinate) {
      sys.coordinate_ = q;
      sys.momentum_ = p;
    }
  }
  sys.margin_ = margin;
  sys.margin_c_ = CompiledObservable(margin);
  sys.margin_grad_ = {CompiledObservable(margin.derivative(sys.coordinate_)),
                      CompiledObservable(margin.derivative(sys.momentum_))};

  const double r = sys.radius_;
  bool nonempty = false;
  for (double a : {0.0, 0.5 * r, 3.0 * r}) {
    for (double b : {0.0, 0.5 * r, 3.0 * r}) nonempty = nonempty || sys.domain_margin({a, b}) > 0.0;
  }
  if (!nonempty) throw BranchInvalid("requested branch has an empty domain");

  const RationalObservable& h = model.hamiltonian.base;
  if (!h.is_polynomial()) throw ReductionUnsupported("base Hamiltonian must be polynomial");
  Polynomial hp = h.numerator().substitute(slot(momentum), 0);
  hp *= mpq_class(1 / h.denominator().leading_coefficient());
  const auto h_parts = hp.collect(slot(coordinate));
  for (const auto& [n, coeff] : h_parts) {
    sys.powers_.push_back(n);
    sys.h_coeffs_.emplace_back(coeff);
    sys.h_coeffs_grad_.push_back({CompiledObservable(coeff.derivative(sys.coordinate_)),
                                  CompiledObservable(coeff.derivative(sys.momentum_))});
  }
  sys.dh_dp_full_ = CompiledObservable(differentiate(h, sys.momentum_));
  sys.dh_dq_full_ = CompiledObservable(differentiate(h, sys.coordinate_));

  // Closed form: with q_k^2 = s, H = even(s) + q_k odd(s). For these systems
  // even = 0 and odd = kappa s, so H_red = kappa * sign * s^{3/2}.
  Polynomial even;
  Polynomial odd;
  for (const auto& [n, coeff] : h_parts) {
    Polynomial term = coeff;
    const unsigned half = n / 2;
    Polynomial s_pow(1);
    for (unsigned k = 0; k < half; ++k) s_pow *= margin;
    (n % 2 == 0 ? even : odd) += term * s_pow;
  }
  const mpq_class kappa = margin.is_zero() ? mpq_class(0) : odd.leading_coefficient() / margin.leading_coefficient();
  Polynomial check = margin;
  check *= kappa;
  if (!even.is_zero() || !(odd - check).is_zero() || kappa == 0) {
    throw ReductionUnsupported("reduced Hamiltonian is not a multiple of margin^{3/2}");
  }
  const mpq_class signed_kappa = kappa * sign_of(branch);
  sys.printed_sign_ = signed_kappa / mpq_class(2, 3);
  sys.reduced_h_text_ = rational_prefix(signed_kappa) + "(" + margin.to_string() + ")^(3/2)";
  sys.printed_h_text_ = "2/3*(" + margin.to_string() + ")^(3/2)";
  return sys;
}

Velocity2D reduced_vector_field(const ReducedSystem& sys, PhasePoint2D state) {
  return sys.vector_field(state);
}

double angular_rate(const ReducedSystem& sys, PhasePoint2D state) {
  const double r2 = state.q * state.q + state.p * state.p;
  if (r2 > 0.0) {
    const Velocity2D v = sys.vector_field(state);
    return (v.dq * state.p - v.dp * state.q) / r2;
  }
  // At the centre the rotation is trivial; read the rate just beside it.
  const double eps = 1e-8 * std::max(sys.radius(), 1.0);
  const Velocity2D v = sys.vector_field({eps, 0.0});
  return -v.dp / eps;
}

PhasePoint2D analytic_solution(const ReducedSystem& sys, PhasePoint2D initial, double t) {
  const double omega = angular_rate(sys, initial);
  const double c = std::cos(omega * t);
  const double s = std::sin(omega * t);
  return {initial.q * c + initial.p * s, initial.p * c - initial.q * s};
}

nlohmann::json model_summary(const SingularLagrangianModel& model, const ConstraintChainReport& report,
                             const ReducedSystem& sys) {
  nlohmann::json j;
  j["model"] = to_string(model.params.model);
  j["radius"] = model.params.radius;
  j["branch"] = sys.branch() == Branch::Positive ? "+" : "-";
  j["kinetic_coefficient"] = model.kinetic.to_string();
  j["potential"] = model.potential.to_string();
  j["hamiltonian"] = model.hamiltonian.base.to_string();
  for (const auto& c : report.constraints) {
    j["constraints"].push_back({{"label", c.label}, {"expression", c.expression.to_string()}});
  }
  j["eliminated_coordinate_squared"] = sys.margin_polynomial().to_string();
  j["reduced_hamiltonian"] = sys.reduced_h_text();
  j["reduced_hamiltonian_printed"] = sys.printed_h_text();
  j["printed_sign_factor"] = sys.printed_sign().get_str();
  j["sign_discrepancy"] = sys.sign_discrepancy();
  j["domain"] = sys.domain_text();
  j["domain_description"] = sys.domain_description();
  return j;
}

}  // namespace dirac
