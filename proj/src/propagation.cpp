#include "susyqm/propagation.hpp"

#include <cmath>
#include <complex>
#include <functional>

#include "susyqm/eigensolve.hpp"
#include "susyqm/operators.hpp"

namespace susyqm {

namespace {

using Cplx = std::complex<double>;

double energy_expectation(const Eigen::MatrixXd& H, const Eigen::VectorXcd& psi) {
  const Cplx num = psi.dot(H * psi);  // dot conjugates the first argument
  const double den = psi.squaredNorm();
  return num.real() / den;
}

}  // namespace

ComplexField propagate(const ComplexField& psi0, const RealField& potential,
                       const PropagationConfig& cfg, const ModelUnits& units) {
  if (!psi0.grid.same_as(potential.grid)) {
    throw GridMismatch("propagate: state and potential grids differ");
  }
  if (!(cfg.dt > 0.0)) throw DomainError("propagate: dt must be positive");
  if (cfg.n_steps < 0) throw DomainError("propagate: negative step count");

  const int n = psi0.grid.n;
  const Eigen::MatrixXd K = kinetic_matrix(psi0.grid, units);
  Eigen::MatrixXd H = K;
  for (int i = 0; i < n; ++i) H(i, i) += potential.values[i];

  ComplexField out = psi0;
  if (cfg.n_steps == 0) return out;

  const double e0 = energy_expectation(H, psi0.values);
  const double res0 =
      (H * psi0.values - e0 * psi0.values).norm() / psi0.values.norm();
  const bool is_eigenstate = res0 <= 1e-6;

  const Cplx I(0.0, 1.0);
  const Cplx half = I * cfg.dt / (2.0 * units.hbar);

  if (cfg.scheme == Scheme::implicit_midpoint) {
    Eigen::MatrixXcd Ap = Eigen::MatrixXcd::Identity(n, n) + half * H;
    Eigen::MatrixXcd Am = Eigen::MatrixXcd::Identity(n, n) - half * H;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Ap);
    for (long long s = 0; s < cfg.n_steps; ++s) {
      out.values = lu.solve(Am * out.values);
      if (s == 0 && is_eigenstate) {
        const double e1 = energy_expectation(H, out.values);
        if (std::abs(e1 - e0) > 1e-6 * (1.0 + std::abs(e0))) {
          throw StepTooLarge("propagate: eigenstate energy drifted after one step");
        }
      }
    }
    return out;
  }

  // Strang splitting: half potential phase, full kinetic propagator from the
  // one-time eigendecomposition of K, half potential phase.
  Eigen::VectorXcd expV(n);
  for (int i = 0; i < n; ++i) {
    expV[i] = std::exp(-half * potential.values[i]);
  }
  const auto [kappa, S] = symmetric_full(K);
  Eigen::VectorXcd phase(n);
  for (int i = 0; i < n; ++i) {
    phase[i] = std::exp(-I * kappa[i] * cfg.dt / units.hbar);
  }
  const Eigen::MatrixXcd UK =
      S.cast<Cplx>() * phase.asDiagonal() * S.transpose().cast<Cplx>();

  for (long long s = 0; s < cfg.n_steps; ++s) {
    out.values = expV.asDiagonal() * out.values;
    out.values = UK * out.values;
    out.values = expV.asDiagonal() * out.values;
    if (s == 0 && is_eigenstate) {
      const double e1 = energy_expectation(H, out.values);
      if (std::abs(e1 - e0) > 1e-6 * (1.0 + std::abs(e0))) {
        throw StepTooLarge("propagate: eigenstate energy drifted after one step");
      }
    }
  }
  return out;
}

Eigen::MatrixXcd evolution_operator(const RealField& potential, double t,
                                    const ModelUnits& units) {
  const int n = potential.grid.n;
  Eigen::MatrixXd H = kinetic_matrix(potential.grid, units);
  for (int i = 0; i < n; ++i) H(i, i) += potential.values[i];
  const auto [E, S] = symmetric_full(H);
  Eigen::VectorXcd phase(n);
  const Cplx I(0.0, 1.0);
  for (int i = 0; i < n; ++i) phase[i] = std::exp(-I * E[i] * t / units.hbar);
  return S.cast<Cplx>() * phase.asDiagonal() * S.transpose().cast<Cplx>();
}

namespace {

double intertwining_defect(const ComplexField& psi0, const SuperPotential& w,
                           const std::function<Eigen::VectorXcd(
                               const Eigen::VectorXcd&, const RealField&)>& U,
                           const RealField& v1, const RealField& v2,
                           const ModelUnits& units) {
  if (!psi0.grid.same_as(v1.grid) || !psi0.grid.same_as(v2.grid) ||
      !psi0.grid.same_as(w.grid)) {
    throw GridMismatch("intertwining residual: grids differ");
  }
  const Eigen::MatrixXd A =
      annihilation_matrix(w.grid, RealField{w.grid, w.w_values}, units);
  const Eigen::VectorXcd phi0 = A.cast<std::complex<double>>() * psi0.values;
  const double nphi = phi0.norm();
  if (nphi <= 1e-6 * psi0.values.norm()) {
    throw ZeroPartnerState("intertwining residual: A psi0 vanishes");
  }
  const Eigen::VectorXcd lhs =
      A.cast<std::complex<double>>() * U(psi0.values, v1);
  const Eigen::VectorXcd rhs = U(phi0, v2);
  return (lhs - rhs).norm() / nphi;
}

}  // namespace

double intertwining_residual(const ComplexField& psi0, const SuperPotential& w,
                             const RealField& v1, const RealField& v2,
                             double t_final, const PropagationConfig& cfg,
                             const ModelUnits& units) {
  if (!(cfg.dt > 0.0)) throw DomainError("intertwining_residual: dt must be positive");
  const long long steps = std::llround(t_final / cfg.dt);
  PropagationConfig run = cfg;
  run.n_steps = steps;
  auto U = [&](const Eigen::VectorXcd& v, const RealField& pot) {
    ComplexField f{pot.grid, v};
    return propagate(f, pot, run, units).values;
  };
  return intertwining_defect(psi0, w, U, v1, v2, units);
}

double exact_intertwining_residual(const ComplexField& psi0,
                                   const SuperPotential& w, const RealField& v1,
                                   const RealField& v2, double t_final,
                                   const ModelUnits& units) {
  auto U = [&](const Eigen::VectorXcd& v, const RealField& pot) {
    return (evolution_operator(pot, t_final, units) * v).eval();
  };
  return intertwining_defect(psi0, w, U, v1, v2, units);
}

double charge_evolution_defect(const SuperPotential& w, double t,
                               const ModelUnits& units) {
  const int n = w.grid.n;
  const Eigen::MatrixXd A =
      annihilation_matrix(w.grid, RealField{w.grid, w.w_values}, units);
  const Eigen::MatrixXd H1 = A.transpose() * A;
  const Eigen::MatrixXd H2 = A * A.transpose();
  const Cplx I(0.0, 1.0);
  auto expm = [&](const Eigen::MatrixXd& H) {
    const auto [E, S] = symmetric_full(H);
    Eigen::VectorXcd phase(n);
    for (int i = 0; i < n; ++i) phase[i] = std::exp(-I * E[i] * t / units.hbar);
    return (S.cast<Cplx>() * phase.asDiagonal() * S.transpose().cast<Cplx>())
        .eval();
  };
  const Eigen::MatrixXcd U1 = expm(H1);
  const Eigen::MatrixXcd U2 = expm(H2);
  const Eigen::MatrixXcd defect = A.cast<Cplx>() * U1 - U2 * A.cast<Cplx>();
  return defect.cwiseAbs().maxCoeff();
}

}  // namespace susyqm
