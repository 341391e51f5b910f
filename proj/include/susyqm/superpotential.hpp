#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "susyqm/grid.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

// Superpotential samples on a grid plus the scale lambda and the asymptotic
// levels W-> W± (mean of the outer 5% of samples; asym_tol records their
// standard deviation).
struct SuperPotential {
  Grid1D grid;
  Eigen::VectorXd w_values;
  ModelUnits units;
  double w_minus = 0.0;
  double w_plus = 0.0;
  double asym_tol = 0.0;
};

// Wraps explicit W samples (asymptotic levels estimated from the outer 5%).
SuperPotential superpotential_from_samples(const Grid1D& grid,
                                           const Eigen::VectorXd& w,
                                           const ModelUnits& units);

// W = -(lambda/2) d/dx ln(max(rho, floor)). floor <= 0 selects the default
// 1e-14 * max(rho). Outside the region where rho >= floor (and inside the
// 4-point derivative-stencil margin) W is extended linearly from the last
// valid samples. DegenerateDensity if more than 20% of the samples on the
// central half of the domain fall below floor.
SuperPotential superpotential_from_density(const RealField& rho,
                                           const ModelUnits& units,
                                           double floor = 0.0);

enum class RiccatiSign { minus, plus };

// V = W^2 -/+ lambda * W'; W' via the banded derivative with the four edge
// rows on each side replaced by the nearest interior value.
RealField riccati_potential(const SuperPotential& w, RiccatiSign sign);

// V2 = V1 - (hbar^2/2m) d^2/dx^2 ln(max(rho, floor)); the log-curvature
// correction is computed on the interior of the rho-support and extended
// linearly outside. Same floor/degeneracy rules as superpotential_from_density.
RealField partner_potential(const RealField& rho, const RealField& v1,
                            const ModelUnits& units, double floor = 0.0);

// A = lambda*D + diag(W); A_dag = transpose(A) exactly.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> charge_matrices(const SuperPotential& w);

enum class MapDirection { down, up };

// down: A psi / sqrt(E_local); up: A^T psi / sqrt(E_local).
// ZeroEnergy if E_local <= 1e-12.
RealField partner_state_map(const RealField& psi, double E_local,
                            const SuperPotential& w, MapDirection direction);

// delta = 4 (hbar^2/m) phi0(0) phi0'(0), derivative by centered difference
// with step 1e-5.
double semiclassical_splitting(const std::function<double(double)>& phi0,
                               const ModelUnits& units);

// Gaussian-ansatz double-well superpotential and its analytic partner pair:
//   W(x)  = sqrt(2/m) hbar beta (x - x0 tanh(2 x x0 beta))
//   W'(x) = sqrt(2/m) hbar beta (1 - 2 x0^2 beta sech^2(2 x x0 beta))
//   V_{1,2} = W^2 -/+ lambda W'   (evaluated analytically, no differencing)
struct GaussianDoubleWell {
  SuperPotential w;
  RealField v1;
  RealField v2;
};

GaussianDoubleWell gaussian_doublewell_model(double beta, double x0,
                                             const ModelUnits& units,
                                             const Grid1D& grid);

}  // namespace susyqm
