#include "susyqm/superpotential.hpp"

#include <cmath>

#include "susyqm/errors.hpp"
#include "susyqm/operators.hpp"

namespace susyqm {

namespace {

constexpr int STENCIL_MARGIN = 4;  // banded-derivative half width

void fill_asymptotics(SuperPotential& w) {
  const int n = w.grid.n;
  const int n_out = std::max(1, n / 20);
  const auto head = w.w_values.head(n_out);
  const auto tail = w.w_values.tail(n_out);
  w.w_minus = head.mean();
  w.w_plus = tail.mean();
  const double var_m = (head.array() - w.w_minus).square().sum() / n_out;
  const double var_p = (tail.array() - w.w_plus).square().sum() / n_out;
  w.asym_tol = std::sqrt(std::max(var_m, var_p));
}

double default_floor(const RealField& rho, double floor) {
  if (floor > 0.0) return floor;
  return 1e-14 * rho.values.maxCoeff();
}

void check_density(const RealField& rho, double floor) {
  const int n = rho.grid.n;
  const double quarter = 0.25 * (rho.grid.x_max - rho.grid.x_min);
  const double mid = 0.5 * (rho.grid.x_max + rho.grid.x_min);
  int central = 0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(rho.grid.points[static_cast<size_t>(i)] - mid) <= quarter) {
      ++central;
      if (rho.values[i] < floor) ++below;
    }
  }
  if (central == 0 || below * 5 > central) {
    throw DegenerateDensity("density falls below floor on more than 20% of the "
                            "central half of the domain");
  }
}

// Contiguous index block around the maximum where rho >= floor, shrunk by the
// derivative stencil margin on each side.
std::pair<int, int> support_block(const Eigen::VectorXd& rho, double floor) {
  int i0 = 0;
  rho.maxCoeff(&i0);
  int lo = i0;
  while (lo > 0 && rho[lo - 1] >= floor) --lo;
  int hi = i0;
  while (hi < rho.size() - 1 && rho[hi + 1] >= floor) ++hi;
  return {lo + STENCIL_MARGIN, hi - STENCIL_MARGIN};
}

// Linear extension of f outside [lo, hi] using the one-sided slopes at the
// block edges.
void extend_linearly(Eigen::VectorXd& f, int lo, int hi) {
  const int n = static_cast<int>(f.size());
  if (lo > 0) {
    const double s = f[lo + 1] - f[lo];
    for (int i = 0; i < lo; ++i) f[i] = f[lo] + s * (i - lo);
  }
  if (hi < n - 1) {
    const double s = f[hi] - f[hi - 1];
    for (int i = hi + 1; i < n; ++i) f[i] = f[hi] + s * (i - hi);
  }
}

}  // namespace

SuperPotential superpotential_from_samples(const Grid1D& grid,
                                           const Eigen::VectorXd& w,
                                           const ModelUnits& units) {
  if (w.size() != grid.n) {
    throw GridMismatch("superpotential_from_samples: length mismatch");
  }
  SuperPotential sp;
  sp.grid = grid;
  sp.w_values = w;
  sp.units = units;
  fill_asymptotics(sp);
  return sp;
}

SuperPotential superpotential_from_density(const RealField& rho,
                                           const ModelUnits& units, double floor) {
  const double fl = default_floor(rho, floor);
  check_density(rho, fl);
  const auto [lo, hi] = support_block(rho.values, fl);
  if (hi - lo < 2) {
    throw DegenerateDensity("density support too narrow for the derivative stencil");
  }
  const Eigen::VectorXd u = rho.values.array().max(fl).log().matrix();
  Eigen::VectorXd w = (-0.5 * units.lam()) * apply_derivative(rho.grid, u);
  extend_linearly(w, lo, hi);
  return superpotential_from_samples(rho.grid, w, units);
}

RealField riccati_potential(const SuperPotential& w, RiccatiSign sign) {
  const int n = w.grid.n;
  Eigen::VectorXd wp = apply_derivative(w.grid, w.w_values);
  for (int i = 0; i < STENCIL_MARGIN; ++i) {
    wp[i] = wp[STENCIL_MARGIN];
    wp[n - 1 - i] = wp[n - 1 - STENCIL_MARGIN];
  }
  const double s = (sign == RiccatiSign::minus) ? -1.0 : 1.0;
  RealField v;
  v.grid = w.grid;
  v.values = w.w_values.array().square().matrix() + s * w.units.lam() * wp;
  return v;
}

RealField partner_potential(const RealField& rho, const RealField& v1,
                            const ModelUnits& units, double floor) {
  if (!rho.grid.same_as(v1.grid)) {
    throw GridMismatch("partner_potential: rho and V1 on different grids");
  }
  const double fl = default_floor(rho, floor);
  check_density(rho, fl);
  const auto [lo, hi] = support_block(rho.values, fl);
  const int lo2 = lo + STENCIL_MARGIN;
  const int hi2 = hi - STENCIL_MARGIN;
  if (hi2 - lo2 < 2) {
    throw DegenerateDensity("density support too narrow for the curvature stencil");
  }
  const Eigen::VectorXd u = rho.values.array().max(fl).log().matrix();
  const Eigen::VectorXd du = apply_derivative(rho.grid, u);
  Eigen::VectorXd corr = (-units.lam2()) * apply_derivative(rho.grid, du);
  extend_linearly(corr, lo2, hi2);
  RealField v2;
  v2.grid = rho.grid;
  v2.values = v1.values + corr;
  return v2;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> charge_matrices(const SuperPotential& w) {
  Eigen::MatrixXd A = w.units.lam() * derivative_matrix(w.grid);
  A.diagonal() += w.w_values;
  return {A, A.transpose()};
}

RealField partner_state_map(const RealField& psi, double E_local,
                            const SuperPotential& w, MapDirection direction) {
  if (!psi.grid.same_as(w.grid)) {
    throw GridMismatch("partner_state_map: state and W on different grids");
  }
  if (E_local <= 1e-12) {
    throw ZeroEnergy("partner_state_map: E_local <= 1e-12 (cannot map a local "
                     "ground state)");
  }
  const auto [A, At] = charge_matrices(w);
  RealField out;
  out.grid = psi.grid;
  const double inv = 1.0 / std::sqrt(E_local);
  out.values = (direction == MapDirection::down) ? inv * (A * psi.values)
                                                 : inv * (At * psi.values);
  return out;
}

double semiclassical_splitting(const std::function<double(double)>& phi0,
                               const ModelUnits& units) {
  constexpr double h = 1e-5;
  const double dphi = (phi0(h) - phi0(-h)) / (2.0 * h);
  return 4.0 * (units.hbar * units.hbar / units.mass) * phi0(0.0) * dphi;
}

GaussianDoubleWell gaussian_doublewell_model(double beta, double x0,
                                             const ModelUnits& units,
                                             const Grid1D& grid) {
  if (beta <= 0.0) {
    throw DomainError("gaussian_doublewell_model: beta must be positive");
  }
  const double pref = std::sqrt(2.0 / units.mass) * units.hbar * beta;
  const double lam = units.lam();
  const int n = grid.n;
  Eigen::VectorXd wv(n), wp(n);
  for (int i = 0; i < n; ++i) {
    const double x = grid.points[static_cast<size_t>(i)];
    const double th = std::tanh(2.0 * x * x0 * beta);
    const double sech2 = 1.0 - th * th;
    wv[i] = pref * (x - x0 * th);
    wp[i] = pref * (1.0 - 2.0 * x0 * x0 * beta * sech2);
  }
  GaussianDoubleWell model;
  model.w = superpotential_from_samples(grid, wv, units);
  model.v1.grid = grid;
  model.v2.grid = grid;
  model.v1.values = wv.array().square().matrix() - lam * wp;
  model.v2.values = wv.array().square().matrix() + lam * wp;
  return model;
}

}  // namespace susyqm
