#include "susyqm/models.hpp"

namespace susyqm {

Potential1D harmonic_model() {
  Potential1D m;
  m.name = "harmonic";
  m.x_min = -8.0;
  m.x_max = 8.0;
  m.V = [](double x) { return x * x; };
  m.dV = [](double x) { return 2.0 * x; };
  m.partner_V = [](double x) { return x * x + 2.0; };
  return m;
}

Potential1D sextic_model() {
  Potential1D m;
  m.name = "sextic";
  m.x_min = -4.5;
  m.x_max = 4.5;
  m.V = [](double x) {
    const double x2 = x * x;
    return ((x2 + 4.0) * x2 + 1.0) * x2 - 2.0;
  };
  m.dV = [](double x) {
    const double x2 = x * x;
    return ((6.0 * x2 + 16.0) * x2 + 2.0) * x;
  };
  m.partner_V = [](double x) {
    const double x2 = x * x;
    return ((x2 + 4.0) * x2 + 7.0) * x2 + 2.0;
  };
  return m;
}

Potential1D quartic_doublewell_model(double a, double b, double e0) {
  Potential1D m;
  m.name = "quartic-doublewell";
  m.x_min = -2.5;
  m.x_max = 2.5;
  m.V = [a, b, e0](double x) {
    const double x2 = x * x;
    return a * x2 * x2 - b * x2 + e0;
  };
  m.dV = [a, b](double x) { return (4.0 * a * x * x - 2.0 * b) * x; };
  return m;
}

}  // namespace susyqm
