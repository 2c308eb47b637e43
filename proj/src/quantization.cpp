#include "dirac/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>

#include "dirac/errors.hpp"

namespace dirac {

using cd = std::complex<double>;

void QuantizationParams::validate() const {
  if (!std::isfinite(hbar) || !(hbar > 0.0)) throw InvalidInput("hbar must be a finite positive number");
  if (!std::isfinite(radius) || radius < 0.0) throw InvalidInput("radius must be finite and non-negative");
}

std::string_view to_string(BasisKind k) { return k == BasisKind::Number ? "number" : "grid"; }

BasisKind parse_basis_kind(std::string_view s) {
  if (s == "number") return BasisKind::Number;
  if (s == "grid") return BasisKind::Grid;
  throw InvalidInput("unknown basis '" + std::string(s) + "' (expected number or grid)");
}

BasisSpec BasisSpec::number(int n_max) {
  BasisSpec b;
  b.kind = BasisKind::Number;
  b.n_max = n_max;
  return b;
}

BasisSpec BasisSpec::grid(const QuantizationParams& params, int points, double box_scale) {
  BasisSpec b;
  b.kind = BasisKind::Grid;
  b.n_max = 0;
  b.points = points;
  b.box_scale = box_scale;
  const double r = params.radius;
  if (params.model == ModelId::A) {
    b.intervals = {{-r, r}};
    b.points_per_interval = {points};
  } else {
    const double l = box_scale * r;
    b.intervals = {{-l, -r}, {r, l}};
    b.points_per_interval = {points / 2, points - points / 2};
  }
  return b;
}

double BasisSpec::spacing() const {
  if (kind == BasisKind::Number) return 0.0;
  double h = 0.0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    h = std::max(h, (intervals[i].hi - intervals[i].lo) / (points_per_interval[i] + 1));
  }
  return h;
}

std::vector<double> BasisSpec::grid_points() const {
  std::vector<double> x;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const int n = points_per_interval[i];
    const double h = (intervals[i].hi - intervals[i].lo) / (n + 1);
    for (int j = 0; j < n; ++j) x.push_back(intervals[i].lo + (j + 1) * h);
  }
  return x;
}

void BasisSpec::validate(const QuantizationParams& params) const {
  params.validate();
  if (kind == BasisKind::Number) {
    if (n_max < 2) throw InvalidInput("number basis needs n_max >= 2");
    return;
  }
  if (points < 16) throw InvalidInput("grid basis needs at least 16 points");
  if (intervals.empty() || intervals.size() != points_per_interval.size()) {
    throw InvalidInput("grid intervals are inconsistent");
  }
  int total = 0;
  const double r = params.radius;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto [lo, hi] = intervals[i];
    if (!(hi > lo)) throw InvalidInput("grid interval is empty");
    if (points_per_interval[i] < 1) throw InvalidInput("grid interval without points");
    total += points_per_interval[i];
    const bool ok = params.model == ModelId::A ? (lo >= -r && hi <= r) : (hi <= -r || lo >= r);
    if (!ok) throw InvalidInput("grid reaches into the classically excluded region");
  }
  if (total != points) throw InvalidInput("grid point count does not match its intervals");
  if (params.model == ModelId::B && !(box_scale > 1.0)) throw InvalidInput("box scale L/R must exceed 1");
}

double OperatorMatrix::hermiticity_defect() const {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CanonicalOperators build_operators(const BasisSpec& basis, const QuantizationParams& params) {
  basis.validate(params);
  const Eigen::Index n = basis.dimension();
  const double hbar = params.hbar;
  CanonicalOperators ops;
  ops.basis = basis;
  for (auto* op : {&ops.q, &ops.p, &ops.q2, &ops.p2}) {
    op->m = Eigen::MatrixXcd::Zero(n, n);
    op->basis = basis.kind;
  }

  if (basis.kind == BasisKind::Number) {
    const double s = std::sqrt(hbar / 2.0);
    const cd i(0.0, 1.0);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      const double a = std::sqrt(static_cast<double>(k + 1));  // <k|a|k+1>
      ops.q.m(k, k + 1) = s * a;
      ops.q.m(k + 1, k) = s * a;
      ops.p.m(k, k + 1) = -i * s * a;
      ops.p.m(k + 1, k) = i * s * a;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = hbar / 2.0 * static_cast<double>(2 * k + 1);
      ops.q2.m(k, k) = d;
      ops.p2.m(k, k) = d;
      if (k + 2 < n) {
        const double off = hbar / 2.0 * std::sqrt(static_cast<double>((k + 1) * (k + 2)));
        ops.q2.m(k, k + 2) = ops.q2.m(k + 2, k) = off;
        ops.p2.m(k, k + 2) = ops.p2.m(k + 2, k) = -off;
      }
    }
    return ops;
  }

  Eigen::Index offset = 0;
  for (std::size_t seg = 0; seg < basis.intervals.size(); ++seg) {
    const auto [lo, hi] = basis.intervals[seg];
    const int m = basis.points_per_interval[seg];
    const double h = (hi - lo) / (m + 1);
    const cd first = cd(0.0, -hbar / (2.0 * h));
    const double second = hbar * hbar / (h * h);
    for (int j = 0; j < m; ++j) {
      const Eigen::Index r = offset + j;
      const double x = lo + (j + 1) * h;
      ops.q.m(r, r) = x;
      ops.q2.m(r, r) = x * x;
      ops.p2.m(r, r) = 2.0 * second;
      if (j + 1 < m) {
        ops.p.m(r, r + 1) = first;
        ops.p.m(r + 1, r) = -first;
        ops.p2.m(r, r + 1) = ops.p2.m(r + 1, r) = -second;
      }
    }
    offset += m;
  }
  return ops;
}

double commutator_defect(const OperatorMatrix& q, const OperatorMatrix& p, const BasisSpec& basis,
                         const QuantizationParams& params) {
  if (q.dimension() != p.dimension() || q.basis != p.basis || q.dimension() != basis.dimension()) {
    throw DimensionMismatch("Q and P must share basis and dimension");
  }
  const cd ihbar(0.0, params.hbar);
  const Eigen::MatrixXcd comm = q.m * p.m - p.m * q.m;
  const Eigen::Index n = q.dimension();
  if (basis.kind == BasisKind::Number) {
    const Eigen::Index k = n - 1;
    Eigen::MatrixXcd d = comm.topLeftCorner(k, k);
    d.diagonal().array() -= ihbar;
    return d.cwiseAbs().maxCoeff();
  }
  Eigen::VectorXcd psi(n);
  std::vector<bool> interior(static_cast<std::size_t>(n), true);
  Eigen::Index offset = 0;
  for (std::size_t seg = 0; seg < basis.intervals.size(); ++seg) {
    const auto [lo, hi] = basis.intervals[seg];
    const int m = basis.points_per_interval[seg];
    const double h = (hi - lo) / (m + 1);
    for (int j = 0; j < m; ++j) psi(offset + j) = std::sin(std::numbers::pi * (j + 1) * h / (hi - lo));
    interior[static_cast<std::size_t>(offset)] = false;
    interior[static_cast<std::size_t>(offset + m - 1)] = false;
    offset += m;
  }
  const Eigen::VectorXcd d = comm * psi - ihbar * psi;
  double worst = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    if (interior[static_cast<std::size_t>(r)]) worst = std::max(worst, std::abs(d(r)));
  }
  return worst / psi.cwiseAbs().maxCoeff();
}

double commutator_defect(const CanonicalOperators& ops, const QuantizationParams& params) {
  return commutator_defect(ops.q, ops.p, ops.basis, params);
}

OperatorMatrix constraint_operator(const CanonicalOperators& ops, const QuantizationParams& params) {
  const Eigen::Index n = ops.q.dimension();
  const Eigen::MatrixXcd r2 = params.radius * params.radius * Eigen::MatrixXcd::Identity(n, n);
  OperatorMatrix m;
  m.basis = ops.q.basis;
  if (params.model == ModelId::A) {
    m.m = r2 - ops.p2.m - ops.q2.m;
  } else {
    m.m = ops.p2.m + ops.q2.m - r2;
  }
  return m;
}

namespace {

struct Eigensystem {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXcd vectors;
};

Eigensystem hermitian_eigensystem(const Eigen::MatrixXcd& m) {
  Eigensystem out;
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real());
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors().cast<cd>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  return out;
}

double operator_function(double lambda) { return 2.0 / 3.0 * std::pow(lambda, 1.5); }

}  // namespace

SpectralReport physical_spectrum(const OperatorMatrix& m, const QuantizationParams& params, const BasisSpec& basis) {
  const double defect = m.hermiticity_defect();
  if (!(defect < 1e-12)) throw NonHermitian("constraint operator fails the Hermiticity test (defect " +
                                            std::to_string(defect) + ")");
  const Eigensystem es = hermitian_eigensystem(m.m);
  const Eigen::Index n = m.dimension();
  const double scale = n == 0 ? 0.0 : es.values.cwiseAbs().maxCoeff();
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;

  SpectralReport rep;
  rep.params = params;
  rep.basis = basis;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (es.values(k) > tol) {
      kept.push_back(k);
    } else {
      rep.discarded.push_back(es.values(k));
    }
  }
  rep.physical_dimension = static_cast<int>(kept.size());
  for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
    rep.constraint_eigenvalues.push_back(es.values(*it));
    rep.eigenvalues.push_back(operator_function(es.values(*it)));
  }

  // H = sum_k f(lambda_k) v_k v_k^dagger over kept k; upper triangle mirrored.
  rep.hamiltonian.basis = m.basis;
  rep.hamiltonian.m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      cd sum = 0.0;
      for (Eigen::Index k : kept) sum += es.vectors(i, k) * operator_function(es.values(k)) * std::conj(es.vectors(j, k));
      if (i == j) sum = sum.real();
      rep.hamiltonian.m(i, j) = sum;
      rep.hamiltonian.m(j, i) = std::conj(sum);
    }
  }
  return rep;
}

SpectralReport quantize(const QuantizationParams& params, const BasisSpec& basis) {
  const CanonicalOperators ops = build_operators(basis, params);
  return physical_spectrum(constraint_operator(ops, params), params, basis);
}

std::vector<double> number_basis_closed_form(const QuantizationParams& params, int n_max) {
  std::vector<double> out;
  const double r2 = params.radius * params.radius;
  for (int n = 0; n < n_max; ++n) {
    const double osc = params.hbar * (2 * n + 1);
    const double lambda = params.model == ModelId::A ? r2 - osc : osc - r2;
    if (lambda > 0.0) out.push_back(operator_function(lambda));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

namespace {

std::vector<double> lowest_ascending(const SpectralReport& rep, int k) {
  std::vector<double> out(rep.eigenvalues.rbegin(), rep.eigenvalues.rend());
  if (static_cast<int>(out.size()) > k) out.resize(static_cast<std::size_t>(k));
  return out;
}

}  // namespace

ConvergenceStudy grid_convergence_study(const QuantizationParams& params, std::vector<int> grid_sizes, int k,
                                        double box_scale, int number_basis_size) {
  params.validate();
  if (k < 1) throw InvalidInput("track at least one eigenvalue");
  if (grid_sizes.empty()) throw InvalidInput("no grid sizes given");
  if (params.model == ModelId::B && box_scale < 4.0) throw InvalidInput("model B grids need L >= 4R");
  std::sort(grid_sizes.begin(), grid_sizes.end());

  ConvergenceStudy study;
  study.params = params;
  study.box_scale = box_scale;
  study.number_basis_size = number_basis_size;
  study.number_reference = lowest_ascending(quantize(params, BasisSpec::number(number_basis_size)), k);

  std::vector<std::future<SpectralReport>> jobs;
  for (int n : grid_sizes) {
    const BasisSpec basis = BasisSpec::grid(params, n, box_scale);
    basis.validate(params);
    jobs.push_back(std::async(std::launch::async, [params, basis] { return quantize(params, basis); }));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const SpectralReport rep = jobs[i].get();
    ConvergenceRow row;
    row.points = grid_sizes[i];
    row.h = rep.basis.spacing();
    row.lowest = lowest_ascending(rep, k);
    for (std::size_t e = 0; e < row.lowest.size() && e < study.number_reference.size(); ++e) {
      row.error_vs_number.push_back(std::abs(row.lowest[e] - study.number_reference[e]));
    }
    study.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
    auto& row = study.rows[i];
    const auto& finer = study.rows[i + 1];
    for (std::size_t e = 0; e < row.lowest.size() && e < finer.lowest.size(); ++e) {
      row.successive_change.push_back(std::abs(row.lowest[e] - finer.lowest[e]));
    }
  }
  for (int e = 0; e < k; ++e) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : study.rows) {
      if (static_cast<int>(row.successive_change.size()) > e && row.successive_change[e] > 0.0) {
        pts.emplace_back(std::log(row.h), std::log(row.successive_change[e]));
      }
    }
    if (pts.size() < 2) break;
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (auto [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    study.observed_order.push_back(sxy / sxx);
  }
  return study;
}

nlohmann::json to_json(const SpectralReport& report) {
  nlohmann::json j;
  j["params"] = {{"hbar", report.params.hbar},
                 {"radius", report.params.radius},
                 {"model", to_string(report.params.model)}};
  nlohmann::json b = {{"kind", to_string(report.basis.kind)}, {"dimension", report.basis.dimension()}};
  if (report.basis.kind == BasisKind::Number) {
    b["n_max"] = report.basis.n_max;
  } else {
    b["points"] = report.basis.points;
    b["spacing"] = report.basis.spacing();
    b["box_scale"] = report.basis.box_scale;
    for (const auto& iv : report.basis.intervals) b["intervals"].push_back({iv.lo, iv.hi});
    b["boundary_condition"] = "dirichlet";
  }
  j["basis"] = b;
  j["physical_dimension"] = report.physical_dimension;
  j["eigenvalues"] = report.eigenvalues;
  j["constraint_eigenvalues"] = report.constraint_eigenvalues;
  j["discarded_count"] = report.discarded_count();
  j["discarded_constraint_eigenvalues"] = report.discarded;
  return j;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_csv(std::ostream& os, const ConvergenceStudy& study) {
  const std::size_t k = study.number_reference.size();
  os << "h";
  for (std::size_t e = 0; e < k; ++e) os << ",E" << e + 1;
  for (std::size_t e = 0; e < k; ++e) os << ",err" << e + 1;
  for (std::size_t e = 0; e < k; ++e) os << ",change" << e + 1;
  os << ",points\n";
  for (const auto& row : study.rows) {
    put(os, row.h);
    auto column = [&os, k](const std::vector<double>& v) {
      for (std::size_t e = 0; e < k; ++e) {
        os << ',';
        if (e < v.size()) put(os, v[e]);
      }
    };
    column(row.lowest);
    column(row.error_vs_number);
    column(row.successive_change);
    os << ',' << row.points << '\n';
  }
}

}  // namespace dirac
