#pragma once

// Canonical quantization of the reduced systems: position / momentum
// matrices in a truncated oscillator basis or on a finite-difference grid,
// the constraint operator M, and the physical-subspace spectrum of
// H = (2/3) M^{3/2}.

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "dirac/model_systems.hpp"
#include "json.hpp"

namespace dirac {

struct QuantizationParams {
  double hbar = 1.0;
  double radius = 2.0;
  ModelId model = ModelId::A;

  // hbar > 0, radius >= 0 (radius 0 is the empty disc).
  void validate() const;
};

enum class BasisKind { Number, Grid };

std::string_view to_string(BasisKind k);
BasisKind parse_basis_kind(std::string_view s);

struct Interval {
  double lo;
  double hi;
};

struct BasisSpec {
  BasisKind kind = BasisKind::Number;
  int n_max = 10;                    // number basis: states n = 0 .. n_max-1
  int points = 0;                    // grid: total interior points
  std::vector<Interval> intervals;   // grid: Dirichlet at every endpoint
  std::vector<int> points_per_interval;
  double box_scale = 8.0;            // model B: L = box_scale * R

  static BasisSpec number(int n_max);
  // (-R, R) for model A; (-L, -R) and (R, L) for model B.
  static BasisSpec grid(const QuantizationParams& params, int points, double box_scale = 8.0);

  int dimension() const { return kind == BasisKind::Number ? n_max : points; }
  // Largest grid spacing (0 for the number basis).
  double spacing() const;
  std::vector<double> grid_points() const;
  void validate(const QuantizationParams& params) const;
};

struct OperatorMatrix {
  Eigen::MatrixXcd m;
  BasisKind basis = BasisKind::Number;

  Eigen::Index dimension() const { return m.rows(); }
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() < tol; }
};

// Q and P plus their squares, which are built directly (ladder algebra or
// the second difference) rather than as products of truncated matrices.
struct CanonicalOperators {
  BasisSpec basis;
  OperatorMatrix q;
  OperatorMatrix p;
  OperatorMatrix q2;
  OperatorMatrix p2;
};

CanonicalOperators build_operators(const BasisSpec& basis, const QuantizationParams& params);

// Number basis: max |[Q,P] - i hbar I| over the block without the last
// state. Grid: max |([Q,P] - i hbar) psi| / max |psi| on interior rows for a
// smooth probe psi vanishing at the Dirichlet ends. Throws DimensionMismatch.
double commutator_defect(const CanonicalOperators& ops, const QuantizationParams& params);
double commutator_defect(const OperatorMatrix& q, const OperatorMatrix& p, const BasisSpec& basis,
                         const QuantizationParams& params);

// A: R^2 - P^2 - Q^2,  B: P^2 + Q^2 - R^2.
OperatorMatrix constraint_operator(const CanonicalOperators& ops, const QuantizationParams& params);

struct SpectralReport {
  QuantizationParams params;
  BasisSpec basis;
  int physical_dimension = 0;
  std::vector<double> eigenvalues;            // H on the physical subspace, descending
  std::vector<double> constraint_eigenvalues; // matching positive eigenvalues of M
  std::vector<double> discarded;              // non-positive eigenvalues of M, ascending
  OperatorMatrix hamiltonian;                 // (2/3) M^{3/2} projected, in the basis

  int discarded_count() const { return static_cast<int>(discarded.size()); }
  double lowest() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

// Spectral decomposition of M; eigenvectors with eigenvalue > 0 span the
// physical subspace. Throws NonHermitian.
SpectralReport physical_spectrum(const OperatorMatrix& m, const QuantizationParams& params, const BasisSpec& basis);

// Convenience: operators, constraint operator and spectrum in one call.
SpectralReport quantize(const QuantizationParams& params, const BasisSpec& basis);

// Closed-form number-basis spectrum: (2/3)(+-(R^2 - hbar(2n+1)))^{3/2} for
// the positive cases with n < n_max, descending.
std::vector<double> number_basis_closed_form(const QuantizationParams& params, int n_max);

struct ConvergenceRow {
  int points = 0;
  double h = 0.0;
  std::vector<double> lowest;              // lowest k physical H eigenvalues, ascending
  std::vector<double> error_vs_number;     // |grid - number basis| per eigenvalue
  std::vector<double> successive_change;   // |E(h) - E(next finer h)|, empty on the finest row
};

struct ConvergenceStudy {
  QuantizationParams params;
  double box_scale = 8.0;
  int number_basis_size = 0;
  std::vector<double> number_reference;    // lowest k, ascending
  std::vector<ConvergenceRow> rows;        // ascending point count
  // Least-squares log-log slope of successive_change vs h, per eigenvalue.
  std::vector<double> observed_order;
};

// Grids are solved concurrently. k is the number of eigenvalues tracked.
ConvergenceStudy grid_convergence_study(const QuantizationParams& params, std::vector<int> grid_sizes, int k = 2,
                                        double box_scale = 8.0, int number_basis_size = 200);

nlohmann::json to_json(const SpectralReport& report);
void write_csv(std::ostream& os, const ConvergenceStudy& study);

}  // namespace dirac
