#include "susyqm/grid2d.hpp"

#include <cmath>

namespace susyqm {

Grid2D make_grid2d(double x_min, double x_max, int nx, double y_min,
                   double y_max, int ny) {
  return Grid2D{make_grid(x_min, x_max, nx), make_grid(y_min, y_max, ny)};
}

Field2D sample_field2d(const Grid2D& grid,
                       const std::function<double(double, double)>& f) {
  Field2D out;
  out.grid = grid;
  out.values.resize(grid.size());
  for (int ix = 0; ix < grid.nx(); ++ix) {
    for (int iy = 0; iy < grid.ny(); ++iy) {
      out.values[grid.idx(ix, iy)] = f(grid.x.points[ix], grid.y.points[iy]);
    }
  }
  return out;
}

Eigen::VectorXd trapezoid_weights_2d(const Grid2D& grid) {
  Eigen::VectorXd out(grid.size());
  for (int ix = 0; ix < grid.nx(); ++ix) {
    const double wx =
        (ix == 0 || ix == grid.nx() - 1) ? 0.5 * grid.x.h : grid.x.h;
    for (int iy = 0; iy < grid.ny(); ++iy) {
      const double wy =
          (iy == 0 || iy == grid.ny() - 1) ? 0.5 * grid.y.h : grid.y.h;
      out[grid.idx(ix, iy)] = wx * wy;
    }
  }
  return out;
}

double norm2_riemann_2d(const Field2D& f) {
  return std::sqrt(f.values.squaredNorm() * f.grid.x.h * f.grid.y.h);
}

}  // namespace susyqm
