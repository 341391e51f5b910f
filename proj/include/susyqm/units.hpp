#pragma once

#include <cmath>
#include <string>

namespace susyqm {

// CODATA hartree -> cm^-1 conversion, the single named constant used for all
// energy-unit conversion in the toolkit.
inline constexpr double HARTREE_CM1 = 219474.6313632;

// Proton mass in electron masses (atomic units).
inline constexpr double PROTON_MASS_AU = 1837.152646;

// Unit system carried by every operator construction. The composite scale
// lam = hbar / sqrt(2 m) multiplies the first-derivative part of the charge
// operators; lam^2 = hbar^2 / (2 m) scales the kinetic operator.
struct ModelUnits {
  double hbar = 1.0;
  double mass = 0.5;

  double lam() const { return hbar / std::sqrt(2.0 * mass); }
  double lam2() const {
    const double l = lam();
    return l * l;
  }

  // hbar = 1, mass = 1/2: lam = 1. Used by all dimensionless test problems.
  static ModelUnits dimensionless() { return ModelUnits{1.0, 0.5}; }

  // Atomic units (hbar = 1) with an explicit particle mass in electron
  // masses; energies in hartree, lengths in bohr.
  static ModelUnits atomic(double mass_au) { return ModelUnits{1.0, mass_au}; }
};

// Converts energies between "hartree" and "cm-1". Throws UnsupportedUnit for
// anything else.
double unit_convert(double value, const std::string& from, const std::string& to);

}  // namespace susyqm
