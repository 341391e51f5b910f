#include "susyqm/grid.hpp"

#include <cmath>

namespace susyqm {

Grid1D make_grid(double x_min, double x_max, int n) {
  if (!(x_min < x_max)) {
    throw DomainError("make_grid requires x_min < x_max");
  }
  if (n < 3) {
    throw DomainError("make_grid requires n >= 3");
  }
  Grid1D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n = n;
  g.h = (x_max - x_min) / static_cast<double>(n - 1);
  g.points.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    g.points[static_cast<size_t>(i)] = x_min + g.h * static_cast<double>(i);
  }
  g.points.back() = x_max;
  return g;
}

RealField sample_field(const Grid1D& grid, const std::function<double(double)>& f) {
  RealField out;
  out.grid = grid;
  out.values.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    out.values[i] = f(grid.points[static_cast<size_t>(i)]);
  }
  return out;
}

double norm2_riemann(const RealField& f) { return f.values.squaredNorm() * f.grid.h; }

double norm2_riemann(const ComplexField& f) { return f.values.squaredNorm() * f.grid.h; }

void normalize_riemann(RealField& f) {
  const double n2 = norm2_riemann(f);
  if (n2 <= 0.0) {
    throw DomainError("cannot normalize a zero field");
  }
  f.values /= std::sqrt(n2);
}

void normalize_riemann(ComplexField& f) {
  const double n2 = norm2_riemann(f);
  if (n2 <= 0.0) {
    throw DomainError("cannot normalize a zero field");
  }
  f.values /= std::sqrt(n2);
}

namespace {

std::complex<double> trapezoid_dot(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b,
                                   double h) {
  std::complex<double> total = (a.conjugate().cwiseProduct(b)).sum();
  std::complex<double> ends =
      std::conj(a[0]) * b[0] + std::conj(a[a.size() - 1]) * b[b.size() - 1];
  return h * (total - 0.5 * ends);
}

}  // namespace

double inner_trapezoid(const RealField& a, const RealField& b) {
  if (!a.grid.same_as(b.grid)) {
    throw GridMismatch("inner_trapezoid: fields on different grids");
  }
  const auto n = a.values.size();
  double total = a.values.dot(b.values);
  total -= 0.5 * (a.values[0] * b.values[0] + a.values[n - 1] * b.values[n - 1]);
  return a.grid.h * total;
}

std::complex<double> inner_trapezoid(const ComplexField& a, const ComplexField& b) {
  if (!a.grid.same_as(b.grid)) {
    throw GridMismatch("inner_trapezoid: fields on different grids");
  }
  return trapezoid_dot(a.values, b.values, a.grid.h);
}

}  // namespace susyqm
