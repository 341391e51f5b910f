#pragma once

#include <Eigen/Dense>
#include <functional>

#include "susyqm/grid.hpp"

namespace susyqm {

// Tensor-product grid, flattened row-major over (ix, iy): idx = ix*ny + iy.
struct Grid2D {
  Grid1D x;
  Grid1D y;

  int nx() const { return x.n; }
  int ny() const { return y.n; }
  int size() const { return x.n * y.n; }
  int idx(int ix, int iy) const { return ix * y.n + iy; }
  bool same_as(const Grid2D& other) const {
    return x.same_as(other.x) && y.same_as(other.y);
  }
};

Grid2D make_grid2d(double x_min, double x_max, int nx, double y_min,
                   double y_max, int ny);

struct Field2D {
  Grid2D grid;
  Eigen::VectorXd values;  // size nx*ny, row-major over (ix, iy)
};

// Two-component field on one grid (both components flattened row-major).
struct VectorField2 {
  Grid2D grid;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

Field2D sample_field2d(const Grid2D& grid,
                       const std::function<double(double, double)>& f);

// Flattened product trapezoid weights w_ij = wx_i * wy_j.
Eigen::VectorXd trapezoid_weights_2d(const Grid2D& grid);

// sqrt( sum f^2 * hx * hy )
double norm2_riemann_2d(const Field2D& f);

}  // namespace susyqm
