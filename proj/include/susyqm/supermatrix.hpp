#pragma once

#include <Eigen/Dense>

#include "susyqm/superpotential.hpp"

namespace susyqm {

// Block super-operators on a 2n-dimensional space:
//   H = blockdiag(A^T A, A A^T), Q = A in the lower-left block, Q_dag = Q^T.
// Q^2 = 0 holds exactly; {Q, Q_dag} = H up to rounding in the matrix products.
struct SuperMatrices {
  Eigen::MatrixXd H_block;
  Eigen::MatrixXd Q_block;
  Eigen::MatrixXd Q_dag_block;
};

SuperMatrices super_matrices(const SuperPotential& w);

}  // namespace susyqm
