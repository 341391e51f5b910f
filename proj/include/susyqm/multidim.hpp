#pragma once

#include <Eigen/Dense>
#include <vector>

#include "susyqm/errors.hpp"
#include "susyqm/grid2d.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

// 2D DVR Hamiltonian H = Kx (x) Iy + Ix (x) Ky + diag(V), dense over the
// flattened row-major index.
Eigen::MatrixXd hamiltonian_matrix_2d(const Grid2D& grid, const Field2D& V,
                                      const ModelUnits& units);

// W = -lam d/dx ln|psi| on the contiguous support block around the peak
// (|psi| > floor_ratio * max|psi|), shrunk by the 4-point stencil margin and
// extended linearly outside from the boundary slope.
Eigen::VectorXd w_from_logpsi_1d(const Grid1D& grid, const Eigen::VectorXd& psi,
                                 double lam, double floor_ratio = 1e-10);

// Componentwise vector superpotential W_mu = -lam d_mu ln psi0 via per-slice
// log-derivatives. DegenerateDensity if psi0 vanishes over more than 20% of
// the central quarter box.
VectorField2 vector_superpotential(const Field2D& psi0, const ModelUnits& units,
                                   double floor_ratio = 1e-10);

struct Sector1Check {
  double e0_estimate = 0.0;   // from the constant part of lam div W - W^2 + V
  double max_residual = 0.0;  // deviation from constancy over the interior box
};

// Consistency of W with the scalar Riccati relation
// V1 - E0 = W.W - lam div W, evaluated on the interior box (margin 8).
Sector1Check scalar_sector1_check(const VectorField2& w, const Field2D& v1,
                                  const ModelUnits& units);

// The scalar-partner guess U2 = W.W + lam div W (divergence rows inside the
// stencil margin extended from the nearest interior row).
Field2D naive_scalar_partner(const VectorField2& w, const ModelUnits& units);

// Tensor (vector) sector operator built from the charges
// A_mu = lam d_mu + W_mu: blocks (mu,nu) are A_mu A_nu^T, the Gram matrix is
// Ax^T Ax + Ay^T Ay (same nonzero spectrum as the assembled operator).
// Dense blocks are assembled on demand; charge applications are structural
// (1D derivative products on the reshaped field) and never form 2D matrices.
class TensorSectorOperator {
 public:
  TensorSectorOperator(const VectorField2& w, const ModelUnits& units);

  const Grid2D& grid() const { return grid_; }
  int scalar_size() const { return grid_.size(); }
  int size() const { return 2 * grid_.size(); }
  double lam() const { return lam_; }
  const Eigen::VectorXd& wx() const { return wx_; }
  const Eigen::VectorXd& wy() const { return wy_; }

  Eigen::MatrixXd block(int mu, int nu) const;  // N x N
  Eigen::MatrixXd assembled() const;            // 2N x 2N
  Eigen::MatrixXd gram() const;                 // N x N

  VectorField2 apply_A(const Eigen::VectorXd& u) const;   // (Ax u, Ay u)
  Eigen::VectorXd apply_AT(const VectorField2& v) const;  // Ax^T vx + Ay^T vy

 private:
  Grid2D grid_;
  Eigen::MatrixXd dx_, dy_;  // 1D antisymmetric derivative matrices
  Eigen::VectorXd wx_, wy_;
  double lam_ = 1.0;
};

struct TensorSpectrum {
  int kernel_dimension = 0;
  double kernel_max = 0.0;          // largest eigenvalue counted as kernel
  Eigen::VectorXd energies;         // lowest k above the kernel (degeneracy-
                                    // completed within a 1e-8 gap)
  std::vector<VectorField2> states; // Riemann-normalized tensor eigenstates
};

// Lowest nonzero part of the tensor-sector spectrum through the Gram matrix;
// kernel = eigenvalues below 1e-6. Tensor states are recovered from the Gram
// eigenvectors u as (Ax u, Ay u) / sqrt(mu).
TensorSpectrum tensor_ground_state(const TensorSectorOperator& op, int k);

// (A^T v) / sqrt(energy) mapped back to the scalar sector, then
// Riemann-normalized with the sign fixed positive at the peak.
// ZeroEnergy if energy <= 0, ZeroTrial if A^T v vanishes.
Field2D descend_state(const TensorSectorOperator& op, const VectorField2& v,
                      double energy);

// <v, H2v v> / <v, v> with product trapezoid weights on both forms.
// ZeroTrial on a vanishing trial.
double vector_rayleigh_quotient(const TensorSectorOperator& op,
                                const VectorField2& trial);

// Third-sector scalar Hamiltonian built from the componentwise charges
// W2mu = -lam d_mu ln|psi0mu| of the tensor ground state, promoted in
// potential form: H3 = K2d + diag(sum_mu W2mu^2 + lam d_mu W2mu) + e02.
// VanishingComponent if either component is identically negligible.
Eigen::MatrixXd sector3_hamiltonian(const VectorField2& psi0, double e02,
                                    const ModelUnits& units,
                                    double floor_ratio = 1e-10);

}  // namespace susyqm
