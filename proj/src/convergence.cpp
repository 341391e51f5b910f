#include "susyqm/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "susyqm/eigensolve.hpp"
#include "susyqm/errors.hpp"
#include "susyqm/grid.hpp"
#include "susyqm/operators.hpp"

namespace susyqm {

namespace {

constexpr double ERR_FLOOR = 1e-16;

// (E_1 of H1, E_0 of H2) on an n-point grid over the model domain.
std::pair<double, double> sector_energies(const Potential1D& model, int n,
                                          const ModelUnits& units) {
  const Grid1D g = make_grid(model.x_min, model.x_max, n);
  const RealField v1 = sample_field(g, model.V);
  const RealField v2 = sample_field(g, model.partner_V);
  const Eigen::VectorXd e1 =
      symmetric_lowest(hamiltonian_matrix(g, v1, units), 2).first;
  const Eigen::VectorXd e2 =
      symmetric_lowest(hamiltonian_matrix(g, v2, units), 1).first;
  return {e1[1], e2[0]};
}

}  // namespace

ConvergenceTable convergence_study(const Potential1D& model,
                                   const std::vector<int>& n_values, int n_reference,
                                   const ModelUnits& units) {
  if (!model.partner_V) {
    throw DomainError("convergence_study: model has no analytic partner potential");
  }
  if (n_values.empty()) {
    throw DomainError("convergence_study: empty n_values");
  }
  const int n_max = *std::max_element(n_values.begin(), n_values.end());
  if (n_reference <= n_max) {
    throw DomainError("convergence_study: n_reference must exceed max(n_values)");
  }

  ConvergenceTable table;
  table.n_reference = n_reference;
  const auto [ref1, ref2] = sector_energies(model, n_reference, units);
  table.e1_sector1_reference = ref1;
  table.e0_sector2_reference = ref2;

  table.rows.reserve(n_values.size());
  for (int n : n_values) {
    const auto [e1, e2] = sector_energies(model, n, units);
    ConvergenceRow row;
    row.n = n;
    row.err1_1 = std::max(std::abs(e1 - ref1), ERR_FLOOR);
    row.err0_2 = std::max(std::abs(e2 - ref2), ERR_FLOOR);
    row.eps1_1 = std::log10(row.err1_1);
    row.eps0_2 = std::log10(row.err0_2);
    table.rows.push_back(row);
  }
  return table;
}

double median_error_ratio(const ConvergenceTable& table) {
  if (table.rows.empty()) {
    throw DomainError("median_error_ratio: empty table");
  }
  std::vector<double> ratios;
  ratios.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ratios.push_back(row.err1_1 / row.err0_2);
  }
  std::sort(ratios.begin(), ratios.end());
  const size_t m = ratios.size();
  return (m % 2 == 1) ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
}

}  // namespace susyqm
