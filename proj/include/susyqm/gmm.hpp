#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "susyqm/errors.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

// One trial-density term c0 * exp(-c2 (x - c3)^2).
struct GaussianComponent {
  double c0 = 1.0;  // amplitude, > 0
  double c2 = 1.0;  // inverse squared width, > 0
  double c3 = 0.0;  // center
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;

  int size() const { return static_cast<int>(components.size()); }
  // Integral of the (unnormalized) density: sum c0 * sqrt(pi / c2).
  double integral() const;
  // Rescales amplitudes so integral() == 1.
  void normalize();
};

// rho and its first three derivatives at each sample point.
struct MixtureDerivs {
  Eigen::ArrayXd r0, r1, r2, r3;
};

MixtureDerivs mixture_derivs(const GaussianMixture& m, const Eigen::ArrayXd& x);

double mixture_density(const GaussianMixture& m, double x);

// Bohm quantum potential Q[rho](x) = -(hbar^2/2m)(sqrt(rho))''/sqrt(rho),
// evaluated from the analytic mixture derivatives. DegenerateDensity if the
// density underflows at x.
double quantum_potential(const GaussianMixture& m, double x, const ModelUnits& units);

// V(x) + Q(x).
double local_energy(const std::function<double(double)>& V, const GaussianMixture& m,
                    double x, const ModelUnits& units);

struct SampleEnsemble {
  Eigen::ArrayXd points;
  Eigen::ArrayXd weights;  // uniform by default
};

SampleEnsemble make_ensemble(const Eigen::ArrayXd& points);

// Weighted average of local_energy over the ensemble. EmptyEnsemble if there
// are no points.
double energy_functional(const std::function<double(double)>& V,
                         const GaussianMixture& m, const SampleEnsemble& ensemble,
                         const ModelUnits& units);

// Thrown by em_refit when a component collapses onto a point; carries the
// mixture with the offending component reseeded at the widest gap between
// the surviving centers.
class CollapsedComponent : public Error {
 public:
  CollapsedComponent(const std::string& msg, GaussianMixture reseeded, int component)
      : Error("gmm-optimizer", "CollapsedComponent", msg),
        reseeded_mixture(std::move(reseeded)),
        component_index(component) {}
  GaussianMixture reseeded_mixture;
  int component_index;
};

struct EmOptions {
  int rounds = 1;
  // Collapse guard: c2 > 1/(collapse_eps * spacing)^2 is rejected, where
  // spacing defaults to range(points)/(n_p - 1) when spacing_hint == 0.
  double collapse_eps = 0.01;
  double spacing_hint = 0.0;
};

// Standard weighted EM refit of an N-component mixture over the point set,
// initialized from `previous`; the result is normalized to unit integral.
GaussianMixture em_refit(const SampleEnsemble& ensemble, int N,
                         const GaussianMixture& previous, const EmOptions& opts = {});

// Weighted log-likelihood of the (probability-normalized) mixture over the
// ensemble; EM rounds never decrease it.
double mixture_log_likelihood(const SampleEnsemble& ensemble,
                              const GaussianMixture& m);

// 64-bit FNV-1a hash of the raw component parameters, as fixed-width hex.
std::string mixture_hash(const GaussianMixture& m);

namespace detail {
/// Weighted EM responsibilities: reads (pi, mu, var) off `mix` and produces the
// EM-updated targets (pi2, mu2, var2). Shared by em_refit and the optimizer.
void em_responsibilities(const Eigen::ArrayXd& pts, const Eigen::ArrayXd& wts,
                         const GaussianMixture& mix, Eigen::ArrayXd& pi,
                         Eigen::ArrayXd& mu, Eigen::ArrayXd& var,
                         Eigen::ArrayXd& pi2, Eigen::ArrayXd& mu2,
                         Eigen::ArrayXd& var2);
}  // namespace detail

}  // namespace susyqm
