#include "susyqm/supermatrix.hpp"

namespace susyqm {

SuperMatrices super_matrices(const SuperPotential& w) {
  const auto [A, At] = charge_matrices(w);
  const int n = w.grid.n;
  SuperMatrices sm;
  sm.H_block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  sm.H_block.topLeftCorner(n, n).noalias() = At * A;
  sm.H_block.bottomRightCorner(n, n).noalias() = A * At;
  sm.Q_block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  sm.Q_block.bottomLeftCorner(n, n) = A;
  sm.Q_dag_block = sm.Q_block.transpose();
  return sm;
}

}  // namespace susyqm
