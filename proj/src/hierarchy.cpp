#include "susyqm/hierarchy.hpp"

#include <algorithm>
#include <string>

#include "susyqm/eigensolve.hpp"
#include "susyqm/errors.hpp"
#include "susyqm/operators.hpp"

namespace susyqm {

Hierarchy build_hierarchy(const RealField& v1, const ModelUnits& units,
                          int n_sectors) {
  if (n_sectors < 1) {
    throw DomainError("build_hierarchy: n_sectors must be >= 1");
  }
  const Grid1D& grid = v1.grid;
  const double v_edge = std::min(v1.values[0], v1.values[grid.n - 1]);
  {
    const SpectrumResult probe =
        eigensolve(hamiltonian_matrix(grid, v1, units), n_sectors, grid);
    for (int i = 0; i < n_sectors; ++i) {
      if (probe.energies[i] >= v_edge) {
        throw InsufficientBoundStates(
            "build_hierarchy: only " + std::to_string(i) +
            " bound states below the boundary potential, need " +
            std::to_string(n_sectors));
      }
    }
  }

  Hierarchy hier;
  hier.sectors.reserve(static_cast<size_t>(n_sectors));
  RealField v_current = v1;
  double offset = 0.0;
  for (int m = 1; m <= n_sectors; ++m) {
    const SpectrumResult ground =
        eigensolve(hamiltonian_matrix(grid, v_current, units), 1, grid);
    SectorRecord rec;
    rec.index = m;
    rec.potential = v_current;
    rec.ground_energy_local = ground.energies[0];
    rec.ground_density.grid = grid;
    rec.ground_density.values = ground.states[0].values.array().square().matrix();
    rec.superpotential = superpotential_from_density(rec.ground_density, units);
    offset += rec.ground_energy_local;
    hier.cumulative_offsets.push_back(offset);
    if (m < n_sectors) {
      RealField shifted;
      shifted.grid = grid;
      shifted.values =
          v_current.values.array() - rec.ground_energy_local;
      v_current = partner_potential(rec.ground_density, shifted, units);
    }
    hier.sectors.push_back(std::move(rec));
  }
  return hier;
}

}  // namespace susyqm
