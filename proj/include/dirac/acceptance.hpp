#pragma once

#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "dirac/poly_algebra.hpp"

namespace dirac {

// Random polynomial with 1..max_terms terms, total degree <= max_degree,
// and small rational coefficients. R appears in some terms.
Polynomial random_polynomial(std::mt19937_64& rng, unsigned max_degree, int max_terms = 4);

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs every acceptance criterion; when `log` is set, one line per
// criterion is written as it finishes.
std::vector<CriterionResult> run_acceptance(std::ostream* log = nullptr);

}  // namespace dirac
