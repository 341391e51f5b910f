#include "susyqm/operators.hpp"

#include <array>
#include <cmath>

#include "susyqm/errors.hpp"

namespace susyqm {

namespace {
// 8th-order central first-derivative stencil, offsets 1..4.
constexpr std::array<double, 4> FD8 = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0,
                                       -1.0 / 280.0};
}  // namespace

Eigen::MatrixXd derivative_matrix(const Grid1D& grid) {
  const int n = grid.n;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k <= 4; ++k) {
    const double c = FD8[static_cast<size_t>(k - 1)] / grid.h;
    for (int i = 0; i + k < n; ++i) {
      D(i, i + k) += c;
      D(i + k, i) -= c;
    }
  }
  return D;
}

Eigen::VectorXd apply_derivative(const Grid1D& grid, const Eigen::VectorXd& f) {
  if (f.size() != grid.n) {
    throw GridMismatch("apply_derivative: field not on the given grid");
  }
  const int n = grid.n;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int k = 1; k <= 4; ++k) {
    const double c = FD8[static_cast<size_t>(k - 1)] / grid.h;
    for (int i = 0; i + k < n; ++i) {
      out[i] += c * f[i + k];
      out[i + k] -= c * f[i];
    }
  }
  return out;
}

Eigen::MatrixXd kinetic_matrix(const Grid1D& grid, const ModelUnits& units) {
  const int n = grid.n;
  const double pref = units.lam2() / (grid.h * grid.h);
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = pref * (M_PI * M_PI / 3.0);
    for (int j = 0; j < i; ++j) {
      const int d = i - j;
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;
      const double v = pref * 2.0 * sign / (static_cast<double>(d) * d);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::MatrixXd hamiltonian_matrix(const Grid1D& grid, const RealField& V,
                                   const ModelUnits& units) {
  if (!V.grid.same_as(grid)) {
    throw GridMismatch("hamiltonian_matrix: potential not on the given grid");
  }
  Eigen::MatrixXd H = kinetic_matrix(grid, units);
  H.diagonal() += V.values;
  return H;
}

Eigen::MatrixXd annihilation_matrix(const Grid1D& grid, const RealField& w_values,
                                    const ModelUnits& units) {
  if (!w_values.grid.same_as(grid)) {
    throw GridMismatch("annihilation_matrix: W not on the given grid");
  }
  Eigen::MatrixXd A = units.lam() * derivative_matrix(grid);
  A.diagonal() += w_values.values;
  return A;
}

}  // namespace susyqm
