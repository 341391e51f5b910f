#pragma once

#include <complex>
#include <utility>

#include "susyqm/errors.hpp"
#include "susyqm/grid.hpp"
#include "susyqm/superpotential.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

struct ScatteringAmplitudes {
  double energy = 0.0;
  double k = 0.0;        // wavenumber in the left (incoming) channel
  double k_prime = 0.0;  // wavenumber in the right (transmitted) channel
  std::complex<double> R;
  std::complex<double> T;
};

struct AsymptoticLevels {
  double left = 0.0;
  double right = 0.0;
};

// Reflection/transmission amplitudes of a plane wave incident from the left
// on the sampled potential, by piecewise-constant transfer matrices over the
// grid segments (segment value = endpoint average). The outer 10% of samples
// must be flat to 1e-4 * range(V) + 1e-12 (NonAsymptoticPotential) and both
// channels must be open (ClosedChannel).
ScatteringAmplitudes solve_scattering(const RealField& potential, double energy,
                                      const ModelUnits& units);

// Maps sector-2 amplitudes to sector-1 amplitudes through the first-order
// intertwiner A = lam d/dx + W acting on the asymptotic plane waves:
//   R1 = (W- + i lam k) / (W- - i lam k) * R2
//   T1 = (W+ - i lam k') / (W- - i lam k) * T2
// with k, k' recomputed from the superpotential channel levels W-^2, W+^2 so
// that both sectors share one energy (dispersion-consistent form).
ScatteringAmplitudes partner_amplitudes(const SuperPotential& w,
                                        const ScatteringAmplitudes& amp2);

// Asymptotic plateau values of w from the outer 5% of samples; flat to
// 1e-4 * range(w) + 1e-12 or NonAsymptoticSuperpotential. Stores the levels
// on `w` (w_minus / w_plus) and returns them.
AsymptoticLevels asymptotic_levels(SuperPotential& w);

}  // namespace susyqm
