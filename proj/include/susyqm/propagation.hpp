#pragma once

#include <Eigen/Dense>

#include "susyqm/errors.hpp"
#include "susyqm/grid.hpp"
#include "susyqm/superpotential.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

enum class Scheme {
  implicit_midpoint,  // Cayley form, exactly unitary and norm-preserving
  split_operator,     // Strang V/2 - K - V/2 with a dense kinetic propagator
};

struct PropagationConfig {
  double dt = 1e-3;
  long long n_steps = 0;
  Scheme scheme = Scheme::implicit_midpoint;
};

// Evolves psi0 under H = K + V for n_steps of size dt. The map is linear (no
// renormalization). If psi0 is numerically an eigenstate and the first step
// drifts its energy expectation by more than 1e-6 (relative), StepTooLarge.
ComplexField propagate(const ComplexField& psi0, const RealField& potential,
                       const PropagationConfig& cfg, const ModelUnits& units);

// Dense exact propagator U = exp(-i H t / hbar) from the full
// eigendecomposition of H (reference oracle for the stepping schemes).
Eigen::MatrixXcd evolution_operator(const RealField& potential, double t,
                                    const ModelUnits& units);

// || A U1(t) psi0 - U2(t) A psi0 || / || A psi0 || with the stepped
// propagator of cfg.scheme; steps = round(t_final / dt) (cfg.n_steps is
// ignored). ZeroPartnerState if psi0 is annihilated by A.
double intertwining_residual(const ComplexField& psi0, const SuperPotential& w,
                             const RealField& v1, const RealField& v2,
                             double t_final, const PropagationConfig& cfg,
                             const ModelUnits& units);

// Same defect with the exact (matrix-exponential) propagators.
double exact_intertwining_residual(const ComplexField& psi0,
                                   const SuperPotential& w, const RealField& v1,
                                   const RealField& v2, double t_final,
                                   const ModelUnits& units);

// Max-abs element of A exp(-i H1 t/hbar) - exp(-i H2 t/hbar) A where
// H1 = A^T A and H2 = A A^T are formed from the same discrete charge A.
// The operator identity is exact for any function of the products, so the
// returned value is pure floating-point roundoff.
double charge_evolution_defect(const SuperPotential& w, double t,
                               const ModelUnits& units);

}  // namespace susyqm
