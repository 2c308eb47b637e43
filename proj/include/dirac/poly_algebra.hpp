#pragma once

// Exact polynomial and rational-function arithmetic over the canonical
// variables (q1, q2, p1, p2) plus the formal radius parameter R.

#include <gmpxx.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dirac {

enum class Var : std::uint8_t { q1 = 0, q2 = 1, p1 = 2, p2 = 3 };

inline constexpr std::size_t kChartDim = 4;
// Slot 4 of every exponent vector holds the power of the formal parameter R.
inline constexpr std::size_t kRadiusSlot = 4;
inline constexpr std::size_t kSlots = 5;

constexpr std::size_t slot(Var v) { return static_cast<std::size_t>(v); }

using PhasePoint = std::array<double, kChartDim>;

// Ordered variable list and the coordinate/momentum pairing.
struct CanonicalChart {
  std::array<Var, kChartDim> variables{Var::q1, Var::q2, Var::p1, Var::p2};
  std::array<std::pair<Var, Var>, 2> pairs{{{Var::q1, Var::p1}, {Var::q2, Var::p2}}};

  static const CanonicalChart& standard();

  // Throws InvalidInput unless pairs form a bijection between two
  // coordinates and two momenta drawn from `variables`.
  void validate() const;
  Var conjugate(Var v) const;
  bool is_coordinate(Var v) const;
};

std::string_view slot_name(std::size_t s);
inline std::string_view var_name(Var v) { return slot_name(slot(v)); }

using Exponents = std::array<std::uint16_t, kSlots>;

class Polynomial {
 public:
  // Lexicographic in (q1, q2, p1, p2, R); the last entry is the leading term.
  using TermMap = std::map<Exponents, mpq_class>;

  Polynomial() = default;
  Polynomial(const mpq_class& c);  // NOLINT(google-explicit-constructor)
  Polynomial(long c) : Polynomial(mpq_class(c)) {}  // NOLINT

  static Polynomial variable(Var v);
  static Polynomial radius();
  static Polynomial monomial(const Exponents& e, const mpq_class& c);

  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // True when no chart variable occurs (R may).
  bool is_chart_constant() const;
  unsigned degree_in(std::size_t s) const;
  unsigned total_degree() const;
  const mpq_class& leading_coefficient() const;

  Polynomial derivative(Var v) const;
  // Replace the variable in slot `s` by the constant `value`.
  Polynomial substitute(std::size_t s, const mpq_class& value) const;
  // Coefficients of the powers of the variable in slot `s`.
  std::map<unsigned, Polynomial> collect(std::size_t s) const;

  // Positive rational c such that this / c has coprime integer coefficients.
  mpq_class content() const;
  // Componentwise minimum exponent over all terms.
  Exponents min_exponents() const;
  Polynomial divide_monomial(const Exponents& e) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const mpq_class& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(Polynomial a);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  std::string to_string() const;

 private:
  void add_term(const Exponents& e, const mpq_class& c);
  TermMap terms_;
};

// Quotient of two polynomials. Stored unreduced apart from the shared
// monomial factor and numeric content; the denominator is kept primitive
// with a positive leading coefficient.
class RationalObservable {
 public:
  RationalObservable() : den_(1) {}
  RationalObservable(Polynomial p);  // NOLINT(google-explicit-constructor)
  RationalObservable(long c) : RationalObservable(Polynomial(c)) {}  // NOLINT
  RationalObservable(Polynomial num, Polynomial den);

  static RationalObservable variable(Var v) { return Polynomial::variable(v); }
  static RationalObservable radius() { return Polynomial::radius(); }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }

  RationalObservable& operator+=(const RationalObservable& o);
  RationalObservable& operator-=(const RationalObservable& o);
  RationalObservable& operator*=(const RationalObservable& o);
  RationalObservable& operator/=(const RationalObservable& o);

  friend RationalObservable operator+(RationalObservable a, const RationalObservable& b) { return a += b; }
  friend RationalObservable operator-(RationalObservable a, const RationalObservable& b) { return a -= b; }
  friend RationalObservable operator*(RationalObservable a, const RationalObservable& b) { return a *= b; }
  friend RationalObservable operator/(RationalObservable a, const RationalObservable& b) { return a /= b; }
  friend RationalObservable operator-(RationalObservable a);

  // a/b == c/d  iff  a*d - c*b == 0
  friend bool operator==(const RationalObservable& a, const RationalObservable& b);

  // Sign chosen so the numerator's leading coefficient is positive.
  RationalObservable sign_normalized() const;

  std::string to_string() const;

 private:
  void normalize();
  Polynomial num_;
  Polynomial den_;
};

RationalObservable differentiate(const RationalObservable& f, Var v);

// sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i
RationalObservable poisson_bracket(const RationalObservable& f, const RationalObservable& g);

// Exact rational evaluation folded to double at the end. Throws
// DenominatorVanishes when the denominator is exactly zero at the point.
double evaluate(const RationalObservable& f, const PhasePoint& point, double radius);

// Substitute a numeric R exactly (the double is converted without rounding).
RationalObservable substitute_radius(const RationalObservable& f, double radius);

// Parse text such as "q1^2 + q2^2/3 - R^2" or "-q1/q2". Throws ParseError.
RationalObservable parse_observable(std::string_view text);

// Double-precision image of a rational observable for inner loops.
class CompiledObservable {
 public:
  CompiledObservable() = default;
  explicit CompiledObservable(const RationalObservable& f);

  // Throws DenominatorVanishes when the floating denominator is exactly 0.
  double operator()(const PhasePoint& x, double radius) const;

 private:
  struct Term {
    double coeff;
    Exponents exps;
  };
  static std::vector<Term> lower(const Polynomial& p);
  static double eval(const std::vector<Term>& terms, const std::array<double, kSlots>& v);

  std::vector<Term> num_;
  std::vector<Term> den_;
  bool unit_den_ = true;
};

}  // namespace dirac
