#include "dirac/poly_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dirac/errors.hpp"

namespace dirac {

namespace {

constexpr std::array<std::string_view, kSlots> kSlotNames{"q1", "q2", "p1", "p2", "R"};

Exponents add_exponents(const Exponents& a, const Exponents& b) {
  Exponents r{};
  for (std::size_t i = 0; i < kSlots; ++i) {
    r[i] = static_cast<std::uint16_t>(a[i] + b[i]);
  }
  return r;
}

bool is_unit_monomial(const Exponents& e) {
  return std::all_of(e.begin(), e.end(), [](auto x) { return x == 0; });
}

std::string monomial_text(const Exponents& e) {
  std::string out;
  for (std::size_t i = 0; i < kSlots; ++i) {
    if (e[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += kSlotNames[i];
    if (e[i] > 1) out += "^" + std::to_string(e[i]);
  }
  return out;
}

// Descending term order, "a - b + c" joining.
std::string polynomial_text(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const bool negative = sgn(c) < 0;
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    const mpq_class mag = abs(c);
    if (is_unit_monomial(e)) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += monomial_text(e);
    } else {
      out += mag.get_str() + "*" + monomial_text(e);
    }
  }
  return out;
}

// Single-factor denominators such as q2, q2^3 or 7 print without brackets.
bool is_bare_factor(const Polynomial& p) {
  if (p.size() != 1) return false;
  const auto& [e, c] = *p.terms().begin();
  if (c != 1) return is_unit_monomial(e) && sgn(c) > 0 && c.get_den() == 1;
  int nonzero = 0;
  for (auto x : e) nonzero += x != 0;
  return nonzero == 1;
}

mpz_class lcm_of_denominators(const Polynomial& p) {
  mpz_class l = 1;
  for (const auto& [e, c] : p.terms()) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  }
  return l;
}

}  // namespace

const CanonicalChart& CanonicalChart::standard() {
  static const CanonicalChart chart = [] {
    CanonicalChart c;
    c.validate();
    return c;
  }();
  return chart;
}

void CanonicalChart::validate() const {
  std::array<int, kChartDim> seen{};
  for (auto v : variables) ++seen[slot(v)];
  if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) {
    throw InvalidInput("chart variables must list each of q1, q2, p1, p2 once");
  }
  std::array<int, kChartDim> used{};
  for (const auto& [q, p] : pairs) {
    ++used[slot(q)];
    ++used[slot(p)];
    if (q == p) throw InvalidInput("a canonical pair must join two distinct variables");
  }
  if (std::any_of(used.begin(), used.end(), [](int n) { return n != 1; })) {
    throw InvalidInput("chart pairing is not a bijection");
  }
}

Var CanonicalChart::conjugate(Var v) const {
  for (const auto& [q, p] : pairs) {
    if (q == v) return p;
    if (p == v) return q;
  }
  throw InvalidInput("variable not in chart");
}

bool CanonicalChart::is_coordinate(Var v) const {
  return std::any_of(pairs.begin(), pairs.end(), [v](const auto& pr) { return pr.first == v; });
}

std::string_view slot_name(std::size_t s) { return kSlotNames.at(s); }

Polynomial::Polynomial(const mpq_class& c) {
  if (c != 0) terms_.emplace(Exponents{}, c);
}

Polynomial Polynomial::variable(Var v) {
  Exponents e{};
  e[slot(v)] = 1;
  return monomial(e, 1);
}

Polynomial Polynomial::radius() {
  Exponents e{};
  e[kRadiusSlot] = 1;
  return monomial(e, 1);
}

Polynomial Polynomial::monomial(const Exponents& e, const mpq_class& c) {
  Polynomial p;
  p.add_term(e, c);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && is_unit_monomial(terms_.begin()->first));
}

bool Polynomial::is_chart_constant() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) {
    return std::all_of(t.first.begin(), t.first.begin() + kChartDim, [](auto x) { return x == 0; });
  });
}

unsigned Polynomial::degree_in(std::size_t s) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max<unsigned>(d, e[s]);
  return d;
}

unsigned Polynomial::total_degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) {
    d = std::max<unsigned>(d, std::accumulate(e.begin(), e.end(), 0u));
  }
  return d;
}

const mpq_class& Polynomial::leading_coefficient() const {
  static const mpq_class zero = 0;
  return terms_.empty() ? zero : terms_.rbegin()->second;
}

void Polynomial::add_term(const Exponents& e, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::derivative(Var v) const {
  const auto s = slot(v);
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    if (e[s] == 0) continue;
    Exponents d = e;
    --d[s];
    out.terms_.emplace(d, c * e[s]);
  }
  return out;
}

Polynomial Polynomial::substitute(std::size_t s, const mpq_class& value) const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    Exponents r = e;
    r[s] = 0;
    mpq_class factor = 1;
    for (unsigned k = 0; k < e[s]; ++k) factor *= value;
    out.add_term(r, c * factor);
  }
  return out;
}

std::map<unsigned, Polynomial> Polynomial::collect(std::size_t s) const {
  std::map<unsigned, Polynomial> out;
  for (const auto& [e, c] : terms_) {
    Exponents r = e;
    r[s] = 0;
    out[e[s]].add_term(r, c);
  }
  return out;
}

mpq_class Polynomial::content() const {
  if (terms_.empty()) return 1;
  mpz_class g = 0;
  mpz_class l = 1;
  for (const auto& [e, c] : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  }
  mpq_class r(abs(g), l);
  r.canonicalize();
  return r;
}

Exponents Polynomial::min_exponents() const {
  Exponents m{};
  if (terms_.empty()) return m;
  m.fill(std::numeric_limits<std::uint16_t>::max());
  for (const auto& [e, c] : terms_) {
    for (std::size_t i = 0; i < kSlots; ++i) m[i] = std::min(m[i], e[i]);
  }
  return m;
}

Polynomial Polynomial::divide_monomial(const Exponents& d) const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    Exponents r{};
    for (std::size_t i = 0; i < kSlots; ++i) r[i] = static_cast<std::uint16_t>(e[i] - d[i]);
    out.terms_.emplace_hint(out.terms_.end(), r, c);
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  *this = *this * o;
  return *this;
}

Polynomial& Polynomial::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& [e, v] : terms_) v *= c;
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) out.add_term(add_exponents(ea, eb), ca * cb);
  }
  return out;
}

Polynomial operator-(Polynomial a) {
  for (auto& [e, c] : a.terms_) c = -c;
  return a;
}

std::string Polynomial::to_string() const { return polynomial_text(*this); }

RationalObservable::RationalObservable(Polynomial p) : num_(std::move(p)), den_(1) {}

RationalObservable::RationalObservable(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw DenominatorVanishes("rational observable with zero denominator");
  normalize();
}

void RationalObservable::normalize() {
  if (num_.is_zero()) {
    den_ = Polynomial(1);
    return;
  }
  if (den_.is_constant()) {
    if (den_.leading_coefficient() != 1) {
      num_ *= mpq_class(1 / den_.leading_coefficient());
      den_ = Polynomial(1);
    }
    return;
  }
  Exponents shared = num_.min_exponents();
  const Exponents dmin = den_.min_exponents();
  bool any = false;
  for (std::size_t i = 0; i < kSlots; ++i) {
    shared[i] = std::min(shared[i], dmin[i]);
    any = any || shared[i] != 0;
  }
  if (any) {
    num_ = num_.divide_monomial(shared);
    den_ = den_.divide_monomial(shared);
  }
  mpq_class c = den_.content();
  if (sgn(den_.leading_coefficient()) < 0) c = -c;
  if (c != 1) {
    const mpq_class inv = 1 / c;
    num_ *= inv;
    den_ *= inv;
  }
}

RationalObservable& RationalObservable::operator+=(const RationalObservable& o) {
  if (den_ == o.den_) {
    num_ += o.num_;
  } else {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
  }
  normalize();
  return *this;
}

RationalObservable& RationalObservable::operator-=(const RationalObservable& o) {
  return *this += -o;
}

RationalObservable& RationalObservable::operator*=(const RationalObservable& o) {
  num_ *= o.num_;
  if (!o.den_.is_constant()) den_ *= o.den_;
  normalize();
  return *this;
}

RationalObservable& RationalObservable::operator/=(const RationalObservable& o) {
  if (o.num_.is_zero()) throw DenominatorVanishes("division by the zero observable");
  num_ *= o.den_;
  den_ *= o.num_;
  normalize();
  return *this;
}

RationalObservable operator-(RationalObservable a) {
  a.num_ = -a.num_;
  return a;
}

bool operator==(const RationalObservable& a, const RationalObservable& b) {
  if (a.den_ == b.den_) return a.num_ == b.num_;
  return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
}

RationalObservable RationalObservable::sign_normalized() const {
  if (sgn(num_.leading_coefficient()) < 0) return -*this;
  return *this;
}

std::string RationalObservable::to_string() const {
  if (den_.is_constant()) return num_.to_string();
  // Clear fractional numerator coefficients into the denominator so that
  // 1/2 / q2 prints as 1/(2*q2).
  const mpz_class l = lcm_of_denominators(num_);
  Polynomial num = num_;
  Polynomial den = den_;
  if (l != 1) {
    num *= mpq_class(l);
    den *= mpq_class(l);
  }
  std::string n = num.to_string();
  std::string d = den.to_string();
  if (num.size() > 1) n = "(" + n + ")";
  if (!is_bare_factor(den)) d = "(" + d + ")";
  return n + "/" + d;
}

RationalObservable differentiate(const RationalObservable& f, Var v) {
  const Polynomial& n = f.numerator();
  const Polynomial& d = f.denominator();
  if (d.is_constant()) return RationalObservable(n.derivative(v));
  const Polynomial dd = d.derivative(v);
  if (dd.is_zero()) return RationalObservable(n.derivative(v), d);
  return RationalObservable(n.derivative(v) * d - n * dd, d * d);
}

RationalObservable poisson_bracket(const RationalObservable& f, const RationalObservable& g) {
  const auto& chart = CanonicalChart::standard();
  RationalObservable out;
  for (const auto& [q, p] : chart.pairs) {
    out += differentiate(f, q) * differentiate(g, p);
    out -= differentiate(f, p) * differentiate(g, q);
  }
  return out;
}

namespace {

mpq_class exact_value(const Polynomial& p, const std::array<mpq_class, kSlots>& x) {
  mpq_class sum = 0;
  for (const auto& [e, c] : p.terms()) {
    mpq_class t = c;
    for (std::size_t i = 0; i < kSlots; ++i) {
      for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
    }
    sum += t;
  }
  return sum;
}

mpq_class exact_from_double(double v) {
  if (!std::isfinite(v)) throw InvalidInput("non-finite coordinate");
  return mpq_class(v);
}

}  // namespace

double evaluate(const RationalObservable& f, const PhasePoint& point, double radius) {
  std::array<mpq_class, kSlots> x;
  for (std::size_t i = 0; i < kChartDim; ++i) x[i] = exact_from_double(point[i]);
  x[kRadiusSlot] = exact_from_double(radius);
  const mpq_class den = exact_value(f.denominator(), x);
  if (den == 0) {
    throw DenominatorVanishes("denominator " + f.denominator().to_string() + " vanishes at the point");
  }
  const mpq_class value = exact_value(f.numerator(), x) / den;
  return value.get_d();
}

RationalObservable substitute_radius(const RationalObservable& f, double radius) {
  const mpq_class r = exact_from_double(radius);
  return RationalObservable(f.numerator().substitute(kRadiusSlot, r),
                            f.denominator().substitute(kRadiusSlot, r));
}

CompiledObservable::CompiledObservable(const RationalObservable& f)
    : num_(lower(f.numerator())), den_(lower(f.denominator())) {
  unit_den_ = f.denominator().is_constant() && f.denominator().leading_coefficient() == 1;
}

std::vector<CompiledObservable::Term> CompiledObservable::lower(const Polynomial& p) {
  std::vector<Term> out;
  out.reserve(p.size());
  for (const auto& [e, c] : p.terms()) out.push_back({c.get_d(), e});
  return out;
}

double CompiledObservable::eval(const std::vector<Term>& terms, const std::array<double, kSlots>& v) {
  double sum = 0.0;
  for (const auto& t : terms) {
    double m = t.coeff;
    for (std::size_t i = 0; i < kSlots; ++i) {
      for (unsigned k = 0; k < t.exps[i]; ++k) m *= v[i];
    }
    sum += m;
  }
  return sum;
}

double CompiledObservable::operator()(const PhasePoint& x, double radius) const {
  const std::array<double, kSlots> v{x[0], x[1], x[2], x[3], radius};
  const double n = eval(num_, v);
  if (unit_den_) return n;
  const double d = eval(den_, v);
  if (d == 0.0) throw DenominatorVanishes("denominator vanishes at the point");
  return n / d;
}

}  // namespace dirac
