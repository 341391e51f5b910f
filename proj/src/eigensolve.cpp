#include "susyqm/eigensolve.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>

#include "susyqm/errors.hpp"

namespace susyqm {

std::pair<Eigen::VectorXd, Eigen::MatrixXd> symmetric_lowest(const Eigen::MatrixXd& M,
                                                             int k) {
  const lapack_int n = static_cast<lapack_int>(M.rows());
  if (M.cols() != M.rows() || k < 1 || k > n) {
    throw DomainError("symmetric_lowest: need square M and 1 <= k <= n");
  }
  Eigen::MatrixXd A = M;  // dsyevr overwrites its input
  Eigen::VectorXd w(n);
  Eigen::MatrixXd Z(n, k);
  std::vector<lapack_int> isuppz(static_cast<size_t>(2 * k));
  lapack_int m = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'U', n, A.data(), n, 0.0, 0.0, 1,
      static_cast<lapack_int>(k), 0.0, &m, w.data(), Z.data(), n, isuppz.data());
  if (info != 0 || m < k) {
    throw ConvergenceError("symmetric_lowest: dsyevr failed (info=" +
                           std::to_string(info) + ")");
  }
  return {w.head(k), Z};
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& M) {
  const lapack_int n = static_cast<lapack_int>(M.rows());
  if (M.cols() != M.rows()) {
    throw DomainError("symmetric_eigenvalues: M must be square");
  }
  Eigen::MatrixXd A = M;
  Eigen::VectorXd w(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, A.data(), n, w.data());
  if (info != 0) {
    throw ConvergenceError("symmetric_eigenvalues: dsyevd failed (info=" +
                           std::to_string(info) + ")");
  }
  return w;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> symmetric_full(const Eigen::MatrixXd& M) {
  const lapack_int n = static_cast<lapack_int>(M.rows());
  if (M.cols() != M.rows()) {
    throw DomainError("symmetric_full: M must be square");
  }
  Eigen::MatrixXd A = M;
  Eigen::VectorXd w(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, A.data(), n, w.data());
  if (info != 0) {
    throw ConvergenceError("symmetric_full: dsyevd failed (info=" +
                           std::to_string(info) + ")");
  }
  return {w, A};
}

SpectrumResult eigensolve(const Eigen::MatrixXd& H, int k, const Grid1D& grid) {
  if (H.rows() != grid.n) {
    throw GridMismatch("eigensolve: matrix size does not match grid");
  }
  auto [w, Z] = symmetric_lowest(H, k);
  SpectrumResult res;
  res.energies = w;
  res.states.reserve(static_cast<size_t>(k));
  const double inv_sqrt_h = 1.0 / std::sqrt(grid.h);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd v = Z.col(j);
    const double rn = (H * v - w[j] * v).norm();
    if (rn > 1e-8 * v.norm()) {
      throw ConvergenceError("eigensolve: residual " + std::to_string(rn) +
                             " exceeds tolerance for eigenpair " + std::to_string(j));
    }
    // Sign convention: positive at the first index attaining max |v_i|.
    int imax = 0;
    double amax = 0.0;
    for (int i = 0; i < v.size(); ++i) {
      const double a = std::abs(v[i]);
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (v[imax] < 0.0) v = -v;
    RealField f;
    f.grid = grid;
    f.values = v * inv_sqrt_h;  // LAPACK unit vector -> sum(psi^2)*h = 1
    res.states.push_back(std::move(f));
  }
  res.n_converged = k;
  return res;
}

}  // namespace susyqm
