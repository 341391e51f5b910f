#include "susyqm/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace susyqm {

namespace {

// Mean and max-|deviation from mean| over [begin, begin+count).
std::pair<double, double> block_stats(const Eigen::VectorXd& v, int begin,
                                      int count) {
  double mean = 0.0;
  for (int i = 0; i < count; ++i) mean += v[begin + i];
  mean /= count;
  double dev = 0.0;
  for (int i = 0; i < count; ++i) {
    dev = std::max(dev, std::abs(v[begin + i] - mean));
  }
  return {mean, dev};
}

}  // namespace

ScatteringAmplitudes solve_scattering(const RealField& potential, double energy,
                                      const ModelUnits& units) {
  const int n = potential.grid.n;
  if (n < 20) throw DomainError("solve_scattering: grid too coarse");
  const Eigen::VectorXd& v = potential.values;
  const double lam = units.lam();

  const double vrange = v.maxCoeff() - v.minCoeff();
  const double flat_tol = 1e-4 * vrange + 1e-12;
  const int m = std::max(2, n / 10);
  const auto [vl, dev_l] = block_stats(v, 0, m);
  const auto [vr, dev_r] = block_stats(v, n - m, m);
  if (dev_l > flat_tol || dev_r > flat_tol) {
    throw NonAsymptoticPotential(
        "solve_scattering: potential not flat in the outer 10% of the grid");
  }
  if (energy <= vl || energy <= vr) {
    throw ClosedChannel("solve_scattering: energy " + std::to_string(energy) +
                        " does not open both channels");
  }

  const double k = std::sqrt(energy - vl) / lam;
  const double kp = std::sqrt(energy - vr) / lam;
  const double h = potential.grid.h;

  // Transfer of (psi, psi') across each segment at the averaged level.
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  const double tiny = 1e-12 * std::max(1.0, std::abs(energy));
  for (int i = 0; i + 1 < n; ++i) {
    const double vm = 0.5 * (v[i] + v[i + 1]);
    Eigen::Matrix2d S;
    if (std::abs(energy - vm) < tiny) {
      S << 1.0, h, 0.0, 1.0;
    } else if (energy > vm) {
      const double q = std::sqrt(energy - vm) / lam;
      const double c = std::cos(q * h), s = std::sin(q * h);
      S << c, s / q, -q * s, c;
    } else {
      const double q = std::sqrt(vm - energy) / lam;
      const double c = std::cosh(q * h), s = std::sinh(q * h);
      S << c, s / q, q * s, c;
    }
    M = S * M;
  }

  // psi_L = e^{ik(x-xL)} + R e^{-ik(x-xL)},  psi_R = T e^{ik'(x-xR)}:
  //   M (1+R, ik(1-R))^T = (T, ik' T)^T.
  const std::complex<double> I(0.0, 1.0);
  Eigen::Matrix2cd A;
  Eigen::Vector2cd b;
  A(0, 0) = M(0, 0) - I * k * M(0, 1);
  A(0, 1) = -1.0;
  A(1, 0) = M(1, 0) - I * k * M(1, 1);
  A(1, 1) = -I * kp;
  b(0) = -(M(0, 0) + I * k * M(0, 1));
  b(1) = -(M(1, 0) + I * k * M(1, 1));
  const Eigen::Vector2cd rt = A.fullPivLu().solve(b);

  ScatteringAmplitudes out;
  out.energy = energy;
  out.k = k;
  out.k_prime = kp;
  out.R = rt(0);
  out.T = rt(1);
  return out;
}

ScatteringAmplitudes partner_amplitudes(const SuperPotential& w,
                                        const ScatteringAmplitudes& amp2) {
  const double lam = w.units.lam();
  const double wl = w.w_minus;
  const double wr = w.w_plus;
  const double E = amp2.energy;
  if (E <= wl * wl || E <= wr * wr) {
    throw ClosedChannel(
        "partner_amplitudes: energy below an asymptotic channel level");
  }
  const double k = std::sqrt(E - wl * wl) / lam;
  const double kp = std::sqrt(E - wr * wr) / lam;
  const std::complex<double> I(0.0, 1.0);
  const std::complex<double> denom = wl - I * lam * k;

  ScatteringAmplitudes out;
  out.energy = E;
  out.k = k;
  out.k_prime = kp;
  out.R = (wl + I * lam * k) / denom * amp2.R;
  out.T = (wr - I * lam * kp) / denom * amp2.T;
  return out;
}

AsymptoticLevels asymptotic_levels(SuperPotential& w) {
  const int n = w.grid.n;
  const Eigen::VectorXd& wv = w.w_values;
  const double range = wv.maxCoeff() - wv.minCoeff();
  const double tol = 1e-4 * range + 1e-12;
  const int m = std::max(2, n / 20);
  const auto [wl, dev_l] = block_stats(wv, 0, m);
  const auto [wr, dev_r] = block_stats(wv, n - m, m);
  if (dev_l > tol || dev_r > tol) {
    throw NonAsymptoticSuperpotential(
        "asymptotic_levels: superpotential not flat in the outer 5% of the grid");
  }
  w.w_minus = wl;
  w.w_plus = wr;
  w.asym_tol = tol;
  return {wl, wr};
}

}  // namespace susyqm
