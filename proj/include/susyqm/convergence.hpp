#pragma once

#include <vector>

#include "susyqm/models.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

struct ConvergenceRow {
  int n = 0;
  double err1_1 = 0.0;  // |E_1^(1)(n) - reference|, floored at 1e-16
  double err0_2 = 0.0;  // |E_0^(2)(n) - reference|, floored at 1e-16
  double eps1_1 = 0.0;  // log10 of err1_1
  double eps0_2 = 0.0;  // log10 of err0_2
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  int n_reference = 0;
  double e1_sector1_reference = 0.0;  // E_1^(1) on the reference grid
  double e0_sector2_reference = 0.0;  // E_0^(2) on the reference grid
};

// For each n: diagonalize H1(n) on the model domain and H2(n) built from the
// model's analytic partner potential; errors are measured against the same
// quantities computed on the n_reference grid, each column against its own
// reference, floored at 1e-16 before taking log10.
// Requires model.partner_V (DomainError otherwise) and
// n_reference > max(n_values).
ConvergenceTable convergence_study(const Potential1D& model,
                                   const std::vector<int>& n_values, int n_reference,
                                   const ModelUnits& units);

// Median over rows of err1_1 / err0_2 (sector-2 accuracy advantage).
double median_error_ratio(const ConvergenceTable& table);

}  // namespace susyqm
