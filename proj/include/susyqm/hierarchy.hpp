#pragma once

#include <vector>

#include "susyqm/grid.hpp"
#include "susyqm/superpotential.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

struct SectorRecord {
  int index = 1;                      // 1-based sector index
  RealField potential;                // stored sector potential
  double ground_energy_local = 0.0;   // lowest eigenvalue of this sector
  RealField ground_density;           // psi0^2, integrates to 1
  SuperPotential superpotential;      // Riccati transform of ground_density
};

struct Hierarchy {
  std::vector<SectorRecord> sectors;
  // cumulative_offsets[m-1] = absolute (sector-1 scale) energy of the
  // sector-m ground state = sum of local ground energies through sector m.
  std::vector<double> cumulative_offsets;
};

// Iterates ground state -> Riccati transform -> partner potential. Each new
// sector is built from the previous sector's potential shifted to put its
// local ground at zero, so sector m+1's local ground energy is the m-th
// excitation gap. InsufficientBoundStates if H1 does not hold n_sectors
// states below the boundary potential values.
Hierarchy build_hierarchy(const RealField& v1, const ModelUnits& units,
                          int n_sectors);

}  // namespace susyqm
