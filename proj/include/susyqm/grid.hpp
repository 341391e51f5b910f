#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "susyqm/errors.hpp"

namespace susyqm {

// Uniform collocation grid with both endpoints included:
// points[i] = x_min + i*h, h = (x_max - x_min)/(n - 1).
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n = 0;
  double h = 0.0;
  std::vector<double> points;

  bool same_as(const Grid1D& o) const {
    return n == o.n && x_min == o.x_min && x_max == o.x_max;
  }
};

// Builds a uniform grid; DomainError if x_min >= x_max or n < 3.
Grid1D make_grid(double x_min, double x_max, int n);

struct RealField {
  Grid1D grid;
  Eigen::VectorXd values;
};

struct ComplexField {
  Grid1D grid;
  Eigen::VectorXcd values;
};

// Samples f on the grid.
RealField sample_field(const Grid1D& grid, const std::function<double(double)>& f);

// Riemann quadrature sum(v_i^2) * h (the normalization convention used for
// all eigenstates and densities).
double norm2_riemann(const RealField& f);
double norm2_riemann(const ComplexField& f);

// Rescales so norm2_riemann == 1.
void normalize_riemann(RealField& f);
void normalize_riemann(ComplexField& f);

// Trapezoid-rule inner products (half weights at the endpoints).
double inner_trapezoid(const RealField& a, const RealField& b);
std::complex<double> inner_trapezoid(const ComplexField& a, const ComplexField& b);

}  // namespace susyqm
