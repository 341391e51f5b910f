#include "susyqm/multidim.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>

#include "susyqm/eigensolve.hpp"
#include "susyqm/operators.hpp"

namespace susyqm {

namespace {

constexpr int kMargin = 4;  // one-sided width of the derivative stencil

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::VectorXd flat(const RowMat& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

// d/dx_axis of a flattened field, with the kMargin edge rows on each side of
// that axis held at the nearest interior row (the banded derivative is not
// valid there).
Eigen::VectorXd axis_derivative_extended(const Grid2D& g,
                                         const Eigen::VectorXd& field,
                                         int axis) {
  const int nx = g.nx(), ny = g.ny();
  const int n_axis = (axis == 0) ? nx : ny;
  if (n_axis < 2 * kMargin + 2) {
    throw DomainError("axis derivative: grid too small for the stencil margin");
  }
  const Eigen::MatrixXd d = derivative_matrix(axis == 0 ? g.x : g.y);
  Eigen::Map<const RowMat> U(field.data(), nx, ny);
  RowMat T;
  if (axis == 0) {
    T = d * U;
    for (int r = 0; r < kMargin; ++r) T.row(r) = T.row(kMargin);
    for (int r = nx - kMargin; r < nx; ++r) T.row(r) = T.row(nx - kMargin - 1);
  } else {
    T = U * d.transpose();
    for (int c = 0; c < kMargin; ++c) T.col(c) = T.col(kMargin);
    for (int c = ny - kMargin; c < ny; ++c) T.col(c) = T.col(ny - kMargin - 1);
  }
  return flat(T);
}

}  // namespace

Eigen::MatrixXd hamiltonian_matrix_2d(const Grid2D& grid, const Field2D& V,
                                      const ModelUnits& units) {
  if (!V.grid.same_as(grid)) {
    throw GridMismatch("hamiltonian_matrix_2d: potential grid differs");
  }
  const int nx = grid.nx(), ny = grid.ny(), N = grid.size();
  const Eigen::MatrixXd Kx = kinetic_matrix(grid.x, units);
  const Eigen::MatrixXd Ky = kinetic_matrix(grid.y, units);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
  for (int ix = 0; ix < nx; ++ix) {
    for (int jx = 0; jx < nx; ++jx) {
      const double kv = Kx(ix, jx);
      for (int iy = 0; iy < ny; ++iy) {
        H(grid.idx(ix, iy), grid.idx(jx, iy)) += kv;
      }
    }
  }
  for (int iy = 0; iy < ny; ++iy) {
    for (int jy = 0; jy < ny; ++jy) {
      const double kv = Ky(iy, jy);
      for (int ix = 0; ix < nx; ++ix) {
        H(grid.idx(ix, iy), grid.idx(ix, jy)) += kv;
      }
    }
  }
  for (int i = 0; i < N; ++i) H(i, i) += V.values[i];
  return H;
}

Eigen::VectorXd w_from_logpsi_1d(const Grid1D& grid, const Eigen::VectorXd& psi,
                                 double lam, double floor_ratio) {
  const int n = grid.n;
  if (static_cast<int>(psi.size()) != n) {
    throw GridMismatch("w_from_logpsi_1d: sample count differs from grid");
  }
  const Eigen::ArrayXd a = psi.array().abs();
  int i0 = 0;
  const double amax = a.maxCoeff(&i0);
  if (!(amax > 0.0)) {
    throw DegenerateDensity("w_from_logpsi_1d: all samples vanish");
  }
  const double thr = floor_ratio * amax;
  int lo0 = i0, hi0 = i0;
  while (lo0 > 0 && a[lo0 - 1] > thr) --lo0;
  while (hi0 < n - 1 && a[hi0 + 1] > thr) ++hi0;
  const int lo = lo0 + kMargin;
  const int hi = hi0 - kMargin;
  if (hi - lo < 1) {
    throw DegenerateDensity(
        "w_from_logpsi_1d: support too narrow for the stencil margin");
  }
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = std::log(std::max(a[i], 1e-300));
  const Eigen::MatrixXd D = derivative_matrix(grid);
  const Eigen::VectorXd W = -lam * (D * u);
  Eigen::VectorXd out = W;
  const double sl = W[lo + 1] - W[lo];
  for (int i = 0; i < lo; ++i) out[i] = W[lo] + sl * (i - lo);
  const double sr = W[hi] - W[hi - 1];
  for (int i = hi + 1; i < n; ++i) out[i] = W[hi] + sr * (i - hi);
  return out;
}

VectorField2 vector_superpotential(const Field2D& psi0, const ModelUnits& units,
                                   double floor_ratio) {
  const Grid2D& g = psi0.grid;
  const int nx = g.nx(), ny = g.ny();
  const double fmax = psi0.values.cwiseAbs().maxCoeff();
  const double fl = 1e-14 * fmax;
  int below = 0, total = 0;
  for (int ix = nx / 4; ix < (3 * nx) / 4; ++ix) {
    for (int iy = ny / 4; iy < (3 * ny) / 4; ++iy) {
      ++total;
      if (std::abs(psi0.values[g.idx(ix, iy)]) < fl) ++below;
    }
  }
  if (total == 0 || 5 * below > total) {
    throw DegenerateDensity(
        "vector_superpotential: density vanishes over the central box");
  }
  const double lam = units.lam();
  VectorField2 out;
  out.grid = g;
  out.x.resize(g.size());
  out.y.resize(g.size());
  Eigen::VectorXd slice_x(nx), slice_y(ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) slice_x[ix] = psi0.values[g.idx(ix, iy)];
    const Eigen::VectorXd w = w_from_logpsi_1d(g.x, slice_x, lam, floor_ratio);
    for (int ix = 0; ix < nx; ++ix) out.x[g.idx(ix, iy)] = w[ix];
  }
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) slice_y[iy] = psi0.values[g.idx(ix, iy)];
    const Eigen::VectorXd w = w_from_logpsi_1d(g.y, slice_y, lam, floor_ratio);
    for (int iy = 0; iy < ny; ++iy) out.y[g.idx(ix, iy)] = w[iy];
  }
  return out;
}

Sector1Check scalar_sector1_check(const VectorField2& w, const Field2D& v1,
                                  const ModelUnits& units) {
  if (!w.grid.same_as(v1.grid)) {
    throw GridMismatch("scalar_sector1_check: grids differ");
  }
  const Grid2D& g = w.grid;
  const int nx = g.nx(), ny = g.ny();
  if (nx < 17 || ny < 17) {
    throw DomainError("scalar_sector1_check: grid too small for the interior box");
  }
  const double lam = units.lam();
  const Eigen::VectorXd divx = axis_derivative_extended(g, w.x, 0);
  const Eigen::VectorXd divy = axis_derivative_extended(g, w.y, 1);
  const Eigen::VectorXd r = (w.x.array().square() + w.y.array().square() -
                             lam * (divx.array() + divy.array()) -
                             v1.values.array())
                                .matrix();
  double mean = 0.0;
  int count = 0;
  for (int ix = 8; ix < nx - 8; ++ix) {
    for (int iy = 8; iy < ny - 8; ++iy) {
      mean += r[g.idx(ix, iy)];
      ++count;
    }
  }
  mean /= count;
  double dev = 0.0;
  for (int ix = 8; ix < nx - 8; ++ix) {
    for (int iy = 8; iy < ny - 8; ++iy) {
      dev = std::max(dev, std::abs(r[g.idx(ix, iy)] - mean));
    }
  }
  return {-mean, dev};
}

Field2D naive_scalar_partner(const VectorField2& w, const ModelUnits& units) {
  const Grid2D& g = w.grid;
  const double lam = units.lam();
  const Eigen::VectorXd divx = axis_derivative_extended(g, w.x, 0);
  const Eigen::VectorXd divy = axis_derivative_extended(g, w.y, 1);
  Field2D out;
  out.grid = g;
  out.values = (w.x.array().square() + w.y.array().square() +
                lam * (divx.array() + divy.array()))
                   .matrix();
  return out;
}

TensorSectorOperator::TensorSectorOperator(const VectorField2& w,
                                           const ModelUnits& units)
    : grid_(w.grid),
      dx_(derivative_matrix(w.grid.x)),
      dy_(derivative_matrix(w.grid.y)),
      wx_(w.x),
      wy_(w.y),
      lam_(units.lam()) {
  if (static_cast<int>(w.x.size()) != grid_.size() ||
      static_cast<int>(w.y.size()) != grid_.size()) {
    throw GridMismatch("TensorSectorOperator: component size differs from grid");
  }
}

VectorField2 TensorSectorOperator::apply_A(const Eigen::VectorXd& u) const {
  const int nx = grid_.nx(), ny = grid_.ny();
  Eigen::Map<const RowMat> U(u.data(), nx, ny);
  const RowMat Tx = dx_ * U;
  const RowMat Ty = U * dy_.transpose();
  VectorField2 out;
  out.grid = grid_;
  out.x = lam_ * flat(Tx) + wx_.cwiseProduct(u);
  out.y = lam_ * flat(Ty) + wy_.cwiseProduct(u);
  return out;
}

Eigen::VectorXd TensorSectorOperator::apply_AT(const VectorField2& v) const {
  const int nx = grid_.nx(), ny = grid_.ny();
  Eigen::Map<const RowMat> Vx(v.x.data(), nx, ny);
  Eigen::Map<const RowMat> Vy(v.y.data(), nx, ny);
  const RowMat Tx = dx_ * Vx;
  const RowMat Ty = Vy * dy_.transpose();
  return -lam_ * (flat(Tx) + flat(Ty)) + wx_.cwiseProduct(v.x) +
         wy_.cwiseProduct(v.y);
}

Eigen::MatrixXd TensorSectorOperator::block(int mu, int nu) const {
  if (mu < 0 || mu > 1 || nu < 0 || nu > 1) {
    throw DomainError("TensorSectorOperator::block: component index out of range");
  }
  const int nx = grid_.nx(), ny = grid_.ny(), N = grid_.size();
  const double lam2 = lam_ * lam_;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
  if (mu == nu) {
    const Eigen::MatrixXd& d = (mu == 0) ? dx_ : dy_;
    const Eigen::VectorXd& w = (mu == 0) ? wx_ : wy_;
    const Eigen::MatrixXd c = d.transpose() * d;
    if (mu == 0) {
      for (int ix = 0; ix < nx; ++ix) {
        const int j0 = std::max(0, ix - 2 * kMargin);
        const int j1 = std::min(nx - 1, ix + 2 * kMargin);
        for (int jx = j0; jx <= j1; ++jx) {
          const double cv = c(ix, jx);
          const double dv = d(ix, jx);
          for (int iy = 0; iy < ny; ++iy) {
            const int i = grid_.idx(ix, iy), j = grid_.idx(jx, iy);
            B(i, j) += lam2 * cv + lam_ * dv * (w[j] - w[i]);
          }
        }
      }
    } else {
      for (int iy = 0; iy < ny; ++iy) {
        const int j0 = std::max(0, iy - 2 * kMargin);
        const int j1 = std::min(ny - 1, iy + 2 * kMargin);
        for (int jy = j0; jy <= j1; ++jy) {
          const double cv = c(iy, jy);
          const double dv = d(iy, jy);
          for (int ix = 0; ix < nx; ++ix) {
            const int i = grid_.idx(ix, iy), j = grid_.idx(ix, jy);
            B(i, j) += lam2 * cv + lam_ * dv * (w[j] - w[i]);
          }
        }
      }
    }
    for (int i = 0; i < N; ++i) B(i, i) += w[i] * w[i];
    return B;
  }
  if (mu == 1) {  // Ay Ax^T = (Ax Ay^T)^T
    return block(0, 1).transpose();
  }
  // Ax Ay^T
  for (int ix = 0; ix < nx; ++ix) {
    const int jx0 = std::max(0, ix - kMargin);
    const int jx1 = std::min(nx - 1, ix + kMargin);
    for (int jx = jx0; jx <= jx1; ++jx) {
      const double dvx = dx_(ix, jx);
      if (dvx == 0.0) continue;
      for (int iy = 0; iy < ny; ++iy) {
        const int jy0 = std::max(0, iy - kMargin);
        const int jy1 = std::min(ny - 1, iy + kMargin);
        for (int jy = jy0; jy <= jy1; ++jy) {
          const double dvy = dy_(iy, jy);
          if (dvy == 0.0) continue;
          B(grid_.idx(ix, iy), grid_.idx(jx, jy)) -= lam2 * dvx * dvy;
        }
        B(grid_.idx(ix, iy), grid_.idx(jx, iy)) +=
            lam_ * dvx * wy_[grid_.idx(jx, iy)];
      }
    }
  }
  for (int iy = 0; iy < ny; ++iy) {
    const int jy0 = std::max(0, iy - kMargin);
    const int jy1 = std::min(ny - 1, iy + kMargin);
    for (int jy = jy0; jy <= jy1; ++jy) {
      const double dvy = dy_(iy, jy);
      if (dvy == 0.0) continue;
      for (int ix = 0; ix < nx; ++ix) {
        B(grid_.idx(ix, iy), grid_.idx(ix, jy)) -=
            lam_ * wx_[grid_.idx(ix, iy)] * dvy;
      }
    }
  }
  for (int i = 0; i < N; ++i) B(i, i) += wx_[i] * wy_[i];
  return B;
}

Eigen::MatrixXd TensorSectorOperator::assembled() const {
  const int N = grid_.size();
  Eigen::MatrixXd H(2 * N, 2 * N);
  H.topLeftCorner(N, N) = block(0, 0);
  H.topRightCorner(N, N) = block(0, 1);
  H.bottomLeftCorner(N, N) = block(1, 0);
  H.bottomRightCorner(N, N) = block(1, 1);
  return H;
}

Eigen::MatrixXd TensorSectorOperator::gram() const {
  const int nx = grid_.nx(), ny = grid_.ny(), N = grid_.size();
  const double lam2 = lam_ * lam_;
  const Eigen::MatrixXd cx = dx_.transpose() * dx_;
  const Eigen::MatrixXd cy = dy_.transpose() * dy_;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
  for (int ix = 0; ix < nx; ++ix) {
    const int j0 = std::max(0, ix - 2 * kMargin);
    const int j1 = std::min(nx - 1, ix + 2 * kMargin);
    for (int jx = j0; jx <= j1; ++jx) {
      const double cv = cx(ix, jx);
      const double dv = dx_(ix, jx);
      for (int iy = 0; iy < ny; ++iy) {
        const int i = grid_.idx(ix, iy), j = grid_.idx(jx, iy);
        G(i, j) += lam2 * cv + lam_ * dv * (wx_[i] - wx_[j]);
      }
    }
  }
  for (int iy = 0; iy < ny; ++iy) {
    const int j0 = std::max(0, iy - 2 * kMargin);
    const int j1 = std::min(ny - 1, iy + 2 * kMargin);
    for (int jy = j0; jy <= j1; ++jy) {
      const double cv = cy(iy, jy);
      const double dv = dy_(iy, jy);
      for (int ix = 0; ix < nx; ++ix) {
        const int i = grid_.idx(ix, iy), j = grid_.idx(ix, jy);
        G(i, j) += lam2 * cv + lam_ * dv * (wy_[i] - wy_[j]);
      }
    }
  }
  for (int i = 0; i < N; ++i) G(i, i) += wx_[i] * wx_[i] + wy_[i] * wy_[i];
  return G;
}

TensorSpectrum tensor_ground_state(const TensorSectorOperator& op, int k) {
  if (k < 1) throw DomainError("tensor_ground_state: k must be positive");
  const int N = op.scalar_size();
  const Eigen::MatrixXd G = op.gram();
  const double kernel_threshold = 1e-6;

  int nev = std::min(N, k + 6);
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  int kd = 0;
  for (;;) {
    std::tie(vals, vecs) = symmetric_lowest(G, nev);
    kd = 0;
    while (kd < nev && vals[kd] <= kernel_threshold) ++kd;
    if (kd + k < nev || nev == N) break;
    nev = std::min(N, kd + k + 6);
  }

  int last = std::min(kd + k, nev);
  while (last < nev && vals[last] - vals[last - 1] <= 1e-8) ++last;

  TensorSpectrum out;
  out.kernel_dimension = kd;
  out.kernel_max = (kd > 0) ? vals[kd - 1] : 0.0;
  const int m = last - kd;
  out.energies.resize(m);
  out.states.reserve(m);
  const double cell = std::sqrt(op.grid().x.h * op.grid().y.h);
  for (int i = 0; i < m; ++i) {
    const double mu = vals[kd + i];
    out.energies[i] = mu;
    VectorField2 v = op.apply_A(vecs.col(kd + i));
    const double s = 1.0 / (std::sqrt(mu) * cell);
    v.x *= s;
    v.y *= s;
    out.states.push_back(std::move(v));
  }
  return out;
}

Field2D descend_state(const TensorSectorOperator& op, const VectorField2& v,
                      double energy) {
  if (!v.grid.same_as(op.grid())) {
    throw GridMismatch("descend_state: trial grid differs");
  }
  if (!(energy > 0.0)) {
    throw ZeroEnergy("descend_state: sector energy must be positive");
  }
  Eigen::VectorXd t = op.apply_AT(v) / std::sqrt(energy);
  const double vnorm = std::sqrt(v.x.squaredNorm() + v.y.squaredNorm());
  if (t.norm() <= 1e-12 * std::max(1.0, vnorm)) {
    throw ZeroTrial("descend_state: A^T v vanishes");
  }
  t /= std::sqrt(t.squaredNorm() * op.grid().x.h * op.grid().y.h);
  int imax = 0;
  t.cwiseAbs().maxCoeff(&imax);
  if (t[imax] < 0.0) t = -t;
  return Field2D{op.grid(), std::move(t)};
}

double vector_rayleigh_quotient(const TensorSectorOperator& op,
                                const VectorField2& trial) {
  if (!trial.grid.same_as(op.grid())) {
    throw GridMismatch("vector_rayleigh_quotient: trial grid differs");
  }
  const Eigen::VectorXd w2 = trapezoid_weights_2d(op.grid());
  const double den = (w2.array() * (trial.x.array().square() +
                                    trial.y.array().square()))
                         .sum();
  if (!(den > 1e-300)) {
    throw ZeroTrial("vector_rayleigh_quotient: trial field vanishes");
  }
  const Eigen::VectorXd t = op.apply_AT(trial);
  const VectorField2 Mv = op.apply_A(t);
  const double num = (w2.array() * (trial.x.array() * Mv.x.array() +
                                    trial.y.array() * Mv.y.array()))
                         .sum();
  return num / den;
}

Eigen::MatrixXd sector3_hamiltonian(const VectorField2& psi0, double e02,
                                    const ModelUnits& units,
                                    double floor_ratio) {
  const Grid2D& g = psi0.grid;
  const int nx = g.nx(), ny = g.ny(), N = g.size();
  const double mx = psi0.x.cwiseAbs().maxCoeff();
  const double my = psi0.y.cwiseAbs().maxCoeff();
  const double m = std::max(mx, my);
  if (!(m > 0.0) || mx <= 1e-10 * m || my <= 1e-10 * m) {
    throw VanishingComponent(
        "sector3_hamiltonian: a tensor component is identically negligible");
  }
  const double lam = units.lam();

  Eigen::VectorXd w2x(N), w2y(N);
  Eigen::VectorXd slice_x(nx), slice_y(ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) slice_x[ix] = psi0.x[g.idx(ix, iy)];
    const Eigen::VectorXd w = w_from_logpsi_1d(g.x, slice_x, lam, floor_ratio);
    for (int ix = 0; ix < nx; ++ix) w2x[g.idx(ix, iy)] = w[ix];
  }
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) slice_y[iy] = psi0.y[g.idx(ix, iy)];
    const Eigen::VectorXd w = w_from_logpsi_1d(g.y, slice_y, lam, floor_ratio);
    for (int iy = 0; iy < ny; ++iy) w2y[g.idx(ix, iy)] = w[iy];
  }

  // Potential-form promotion, one direction at a time: U += W^2 + lam W'.
  // The algebraic product A2 A2^T is unusable here -- as a finite matrix it
  // is exactly isospectral to A2^T A2, so the partner's missing zero mode
  // reappears as a spurious edge-localized kernel vector. The DVR kinetic
  // plus the Riccati potential does not admit that mode.
  Eigen::VectorXd U = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd row(nx), col(ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) row[ix] = w2x[g.idx(ix, iy)];
    Eigen::VectorXd wp = apply_derivative(g.x, row);
    for (int i = 0; i < kMargin; ++i) {
      wp[i] = wp[kMargin];
      wp[nx - 1 - i] = wp[nx - 1 - kMargin];
    }
    for (int ix = 0; ix < nx; ++ix) {
      U[g.idx(ix, iy)] += row[ix] * row[ix] + lam * wp[ix];
    }
  }
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) col[iy] = w2y[g.idx(ix, iy)];
    Eigen::VectorXd wp = apply_derivative(g.y, col);
    for (int i = 0; i < kMargin; ++i) {
      wp[i] = wp[kMargin];
      wp[ny - 1 - i] = wp[ny - 1 - kMargin];
    }
    for (int iy = 0; iy < ny; ++iy) {
      U[g.idx(ix, iy)] += col[iy] * col[iy] + lam * wp[iy];
    }
  }
  Eigen::MatrixXd H = hamiltonian_matrix_2d(g, Field2D{g, U}, units);
  H.diagonal().array() += e02;
  return H;
}

}  // namespace susyqm
