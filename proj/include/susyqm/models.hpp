#pragma once

#include <functional>
#include <string>

#include "susyqm/units.hpp"

namespace susyqm {

// Analytic 1D model potential with optional derivative and optional analytic
// supersymmetric partner (same energy origin as V).
struct Potential1D {
  std::string name;
  double x_min = -1.0;
  double x_max = 1.0;
  std::function<double(double)> V;
  std::function<double(double)> dV;         // may be empty
  std::function<double(double)> partner_V;  // may be empty
};

// V = x^2 (ground energy 1 at lambda=1); partner x^2 + 2. Domain (-8, 8).
Potential1D harmonic_model();

// V = x^6 + 4x^4 + x^2 - 2 (ground energy exactly 0 at lambda=1, from
// W = x^3 + 2x); partner x^6 + 4x^4 + 7x^2 + 2. Domain (-4.5, 4.5).
Potential1D sextic_model();

// Quartic double well V = a*x^4 - b*x^2 + e0 (coefficients in the caller's
// energy unit; a per length^4, b per length^2). Domain (-2.5, 2.5).
Potential1D quartic_doublewell_model(double a, double b, double e0);

}  // namespace susyqm
