#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "susyqm/grid.hpp"

namespace susyqm {

struct SpectrumResult {
  Eigen::VectorXd energies;       // ascending
  std::vector<RealField> states;  // normalized so sum(psi^2)*h == 1
  int n_converged = 0;
};

// Lowest-k eigenpairs of a dense symmetric matrix (LAPACK dsyevr, 'V','I').
// Returns (values ascending, column vectors with unit Euclidean norm).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> symmetric_lowest(const Eigen::MatrixXd& M,
                                                             int k);

// All eigenvalues (no vectors) of a dense symmetric matrix (LAPACK dsyevd).
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& M);

// Full eigendecomposition (LAPACK dsyevd).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> symmetric_full(const Eigen::MatrixXd& M);

// Lowest-k bound-state solve on a grid. Each state is renormalized to
// sum(psi^2)*h == 1 with sign fixed positive at the first index of maximum
// |psi|. Residuals ||H psi - E psi|| > 1e-8 ||psi|| raise ConvergenceError.
SpectrumResult eigensolve(const Eigen::MatrixXd& H, int k, const Grid1D& grid);

}  // namespace susyqm
