#pragma once

#include <Eigen/Dense>

#include "susyqm/grid.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

// Antisymmetric banded first-derivative matrix (8th-order central stencil,
// coefficients 4/5, -1/5, 4/105, -1/280 over h). Rows within 4 points of the
// boundary carry truncated bands; consumers that need derivatives near the
// edges must extend from the interior.
Eigen::MatrixXd derivative_matrix(const Grid1D& grid);

// y = D f with the same banded stencil, applied in O(n) without forming the
// dense matrix. GridMismatch if f has the wrong length.
Eigen::VectorXd apply_derivative(const Grid1D& grid, const Eigen::VectorXd& f);

/// Sinc-DVR kinetic-energy matrix:
//   K_ij = lam^2/h^2 * ( pi^2/3          if i == j,
//                        2*(-1)^(i-j)/(i-j)^2  otherwise ).
Eigen::MatrixXd kinetic_matrix(const Grid1D& grid, const ModelUnits& units);

// K + diag(V); GridMismatch if V is not on `grid`.
Eigen::MatrixXd hamiltonian_matrix(const Grid1D& grid, const RealField& V,
                                   const ModelUnits& units);

// A = lam*D + diag(W) and its transpose A^T = -lam*D + diag(W)
// (exact because D is antisymmetric).
Eigen::MatrixXd annihilation_matrix(const Grid1D& grid, const RealField& w_values,
                                    const ModelUnits& units);

}  // namespace susyqm
