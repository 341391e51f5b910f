#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "susyqm/errors.hpp"
#include "susyqm/gmm.hpp"
#include "susyqm/grid.hpp"
#include "susyqm/units.hpp"

namespace susyqm {

struct OptimizerConfig {
  int n_gaussians = 15;
  int n_points = 1000;
  int max_cg_steps = 1000;
  double energy_tolerance = 1e-12;  // quiet-step threshold on delta<E>
  double cg_step_size = 1e-2;       // line-search opening step (alpha0)
  double displacement_cap = 0.05;   // per-point per-step displacement bound
  int em_iterations = 1;            // EM rounds per refit stage
  long long seed = 0;               // controls sample-point jitter only
};

struct TraceRecord {
  int step = 0;
  double energy = 0.0;        // deterministic <E> after this step
  std::string mixture_hash;   // snapshot hash of the mixture parameters
  double node = 0.0;          // node position; NaN when not applicable
};

struct OptimizerTrace {
  std::vector<TraceRecord> records;  // step indices contiguous from 0
};

struct OptimizeResult {
  GaussianMixture mixture;
  double energy = 0.0;
  OptimizerTrace trace;
  int steps_taken = 0;
  bool converged = false;
};

class MaxStepsExceeded : public Error {
 public:
  MaxStepsExceeded(const std::string& msg, OptimizeResult best_so_far)
      : Error("gmm-optimizer", "MaxStepsExceeded", msg),
        best(std::move(best_so_far)) {}
  OptimizeResult best;
};

// Potential callable plus its derivative; when dV is empty a centered
// difference with step 1e-6 is used.
struct PotentialFunctions {
  std::function<double(double)> V;
  std::function<double(double)> dV;
};

struct StepConfig {
  double step_size = 1e-2;
  double displacement_cap = 0.05;
  int max_backtracks = 40;
};

// One gradient step of the sample points against the local energy E(x) of the
// fixed mixture: steepest-descent direction with backtracking line search on
// the density-quadrature ensemble mean. LineSearchFailure after
// max_backtracks rejected trials (signals stagnation).
SampleEnsemble cg_step(const SampleEnsemble& ensemble, const GaussianMixture& m,
                       const PotentialFunctions& pot, const ModelUnits& units,
                       const StepConfig& cfg, std::pair<double, double> domain);

// Deterministic <E> of the mixture: density-weighted mean of V + Q over an
// n_ref-point uniform grid on the domain.
double deterministic_energy(const GaussianMixture& m,
                            const std::function<double(double)>& V,
                            std::pair<double, double> domain,
                            const ModelUnits& units, int n_ref = 301);

// Linear-interpolated position of the single sign change of the sampled
// values (an exact zero counts as a node); NodeCountError carrying the count
// found when it is not exactly one.
double locate_node(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& vals);
double locate_node(const RealField& psi);

// Optional per-step diagnostic evaluated on the current mixture; return NaN
// when the quantity is undefined at this step.
using NodeProbe = std::function<double(const GaussianMixture&)>;

// Adaptive ground-state solver: alternates point moves along per-point
// Polak-Ribiere directions of E(x) with an energy-gated EM refit of the
// mixture (EM-displacement cascade, coordinate sweep, compass polish).
// Stops after 10 consecutive steps with energy decrease below
// energy_tolerance; MaxStepsExceeded (carrying the best result) otherwise.
// `initial` overrides the default uniformly-spread starting mixture.
OptimizeResult optimize_ground_state(const PotentialFunctions& pot,
                                     std::pair<double, double> domain,
                                     const OptimizerConfig& config,
                                     const ModelUnits& units,
                                     const NodeProbe& node_probe = {},
                                     const GaussianMixture* initial = nullptr);

// Deterministic random stream used for sample-point initialization
// (environment-independent replacement for platform RNG facets).
class DeterministicRng {
 public:
  explicit DeterministicRng(uint64_t seed) : eng_(seed) {}
  double uniform01();       // [0, 1)
  double normal();          // standard normal via the polar method
  int uniform_int(int n);   // [0, n)

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace susyqm
