#include "susyqm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "susyqm/eigensolve.hpp"
#include "susyqm/grid.hpp"
#include "susyqm/operators.hpp"

namespace susyqm {

namespace {

constexpr double kTiny = 1e-300;
constexpr int kRefPoints = 301;
constexpr int kQuietWindow = 10;
constexpr int kRestartPeriod = 20;
constexpr double kBoltzmannKappa = 1.0;
constexpr double kCompassStart = 0.05;
constexpr double kCompassMin = 1e-8;
constexpr double kPiFloor = 1e-14;

Eigen::ArrayXd linspace(double lo, double hi, int n) {
  Eigen::ArrayXd out(n);
  if (n == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) out[i] = lo + step * i;
  out[n - 1] = hi;
  return out;
}

// Trapezoid weights of an unordered point set: half-gaps to the sorted
// neighbors, one-sided at the extremes.
Eigen::ArrayXd quad_weights(const Eigen::ArrayXd& pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::ArrayXd w(n);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return pts[a] < pts[b]; });
  Eigen::ArrayXd xs(n);
  for (int i = 0; i < n; ++i) xs[i] = pts[order[i]];
  Eigen::ArrayXd dx(n);
  dx[0] = xs[1] - xs[0];
  dx[n - 1] = xs[n - 1] - xs[n - 2];
  for (int i = 1; i < n - 1; ++i) dx[i] = 0.5 * (xs[i + 1] - xs[i - 1]);
  for (int i = 0; i < n; ++i) w[order[i]] = std::max(dx[i], 0.0);
  return w;
}

GaussianMixture mk(const Eigen::ArrayXd& pi, const Eigen::ArrayXd& mu,
                   const Eigen::ArrayXd& var, double floor) {
  GaussianMixture m;
  const int K = static_cast<int>(pi.size());
  m.components.resize(K);
  for (int k = 0; k < K; ++k) {
    const double v = std::max(var[k], floor);
    const double c2 = 1.0 / (2.0 * v);
    m.components[k].c0 = pi[k] * std::sqrt(c2 / M_PI);
    m.components[k].c2 = c2;
    m.components[k].c3 = mu[k];
  }
  return m;
}

void params_of(const GaussianMixture& m, Eigen::ArrayXd& pi, Eigen::ArrayXd& mu,
               Eigen::ArrayXd& var) {
  const int K = m.size();
  pi.resize(K);
  mu.resize(K);
  var.resize(K);
  for (int k = 0; k < K; ++k) {
    pi[k] = m.components[k].c0 * std::sqrt(M_PI / m.components[k].c2);
    mu[k] = m.components[k].c3;
    var[k] = 1.0 / (2.0 * m.components[k].c2);
  }
  const double s = pi.sum();
  if (s > 0.0) pi /= s;
}

// Local-energy problem on the reference grid: E(x) = V + Q and its spatial
// gradient from the analytic mixture derivatives.
struct RefProblem {
  double lam2 = 1.0;
  double lo = 0.0, hi = 0.0;
  Eigen::ArrayXd xr;      // reference grid
  Eigen::ArrayXd vr;      // V on the reference grid
  const std::function<double(double)>* V = nullptr;
  const std::function<double(double)>* dV = nullptr;

  void eq(const GaussianMixture& mix, const Eigen::ArrayXd& x,
          Eigen::ArrayXd& E, Eigen::ArrayXd& g) const {
    const MixtureDerivs d = mixture_derivs(mix, x);
    const Eigen::ArrayXd r0 = d.r0.max(kTiny);
    const Eigen::ArrayXd u1 = d.r1 / r0;
    const Eigen::ArrayXd u2 = d.r2 / r0 - u1.square();
    const Eigen::ArrayXd u3 = d.r3 / r0 - 3.0 * u1 * u2 - u1.cube();
    const Eigen::ArrayXd Q = -lam2 * (0.5 * u2 + 0.25 * u1.square());
    const Eigen::ArrayXd Qp = -lam2 * (0.5 * u3 + 0.5 * u1 * u2);
    const int n = static_cast<int>(x.size());
    E.resize(n);
    g.resize(n);
    for (int i = 0; i < n; ++i) {
      E[i] = (*V)(x[i]) + Q[i];
      g[i] = (*dV)(x[i]) + Qp[i];
    }
  }

  double det_energy(const GaussianMixture& mix) const {
    const MixtureDerivs d = mixture_derivs(mix, xr);
    const Eigen::ArrayXd r0 = d.r0.max(kTiny);
    const Eigen::ArrayXd u1 = d.r1 / r0;
    const Eigen::ArrayXd u2 = d.r2 / r0 - u1.square();
    const Eigen::ArrayXd Q = -lam2 * (0.5 * u2 + 0.25 * u1.square());
    const Eigen::ArrayXd w = r0 / r0.sum();
    return (w * (vr + Q)).sum();
  }
};

// Greedy per-parameter sweep along the EM displacement directions; accepted
// moves persist into later trials, first improving scale wins per parameter.
// Order per component: center, log-width, weight.
bool coord_sweep(const RefProblem& P, const Eigen::ArrayXd& pi,
                 const Eigen::ArrayXd& mu, const Eigen::ArrayXd& var,
                 const Eigen::ArrayXd& pi2, const Eigen::ArrayXd& mu2,
                 const Eigen::ArrayXd& var2, double curE, double floor,
                 GaussianMixture& out, double& outE) {
  const int K = static_cast<int>(pi.size());
  Eigen::ArrayXd piC = pi, muC = mu, varC = var;
  double bestE = curE;
  bool improved = false;
  const double gammas[4] = {1.0, -1.0, 0.25, -0.25};
  for (int k = 0; k < K; ++k) {
    for (int kind = 0; kind < 3; ++kind) {
      double d0 = 0.0;
      if (kind == 0) {
        d0 = mu2[k] - mu[k];
      } else if (kind == 1) {
        d0 = std::log(std::max(var2[k], kTiny)) - std::log(var[k]);
      } else {
        d0 = pi2[k] - pi[k];
      }
      if (d0 == 0.0) continue;
      for (double g : gammas) {
        Eigen::ArrayXd pc = piC, mc = muC, vc = varC;
        if (kind == 0) {
          mc[k] = muC[k] + g * d0;
        } else if (kind == 1) {
          vc[k] = std::exp(std::log(varC[k]) + g * d0);
        } else {
          pc[k] = std::max(piC[k] + g * d0, kPiFloor);
        }
        const GaussianMixture cand = mk(pc / pc.sum(), mc, vc, floor);
        const double e = P.det_energy(cand);
        if (e < bestE) {
          bestE = e;
          piC = pc;
          muC = mc;
          varC = vc;
          improved = true;
          break;
        }
      }
    }
  }
  if (!improved) return false;
  out = mk(piC / piC.sum(), muC, varC, floor);
  outE = bestE;
  return true;
}

// Pattern-search polish: per parameter, +/- one compass stride (center in
// units of the component width, variance and weight in log space). Accepted
// weight moves are renormalized immediately.
bool compass_sweep(const RefProblem& P, const GaussianMixture& mix, double curE,
                   double floor, double s, GaussianMixture& out, double& outE) {
  Eigen::ArrayXd pi, mu, var;
  params_of(mix, pi, mu, var);
  const int K = static_cast<int>(pi.size());
  double bestE = curE;
  bool improved = false;
  const double signs[2] = {1.0, -1.0};
  for (int k = 0; k < K; ++k) {
    const double sig = std::sqrt(var[k]);
    for (int kind = 0; kind < 3; ++kind) {
      for (double sgn : signs) {
        Eigen::ArrayXd pc = pi, mc = mu, vc = var;
        if (kind == 0) {
          mc[k] = mu[k] + sgn * s * sig;
        } else if (kind == 1) {
          vc[k] = std::exp(std::log(var[k]) + sgn * s);
        } else {
          pc[k] = std::max(pi[k] * std::exp(sgn * s), kPiFloor);
        }
        const GaussianMixture cand = mk(pc / pc.sum(), mc, vc, floor);
        const double e = P.det_energy(cand);
        if (e < bestE) {
          bestE = e;
          mu = mc;
          var = vc;
          pi = pc / pc.sum();
          improved = true;
          break;
        }
      }
    }
  }
  if (!improved) return false;
  out = mk(pi, mu, var, floor);
  outE = bestE;
  return true;
}

std::function<double(double)> make_derivative(
    const std::function<double(double)>& V) {
  return [V](double x) {
    const double h = 1e-6;
    return (V(x + h) - V(x - h)) / (2.0 * h);
  };
}

}  // namespace

double DeterministicRng::uniform01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double DeterministicRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

int DeterministicRng::uniform_int(int n) {
  return static_cast<int>(eng_() % static_cast<uint64_t>(n));
}

double deterministic_energy(const GaussianMixture& m,
                            const std::function<double(double)>& V,
                            std::pair<double, double> domain,
                            const ModelUnits& units, int n_ref) {
  if (!(domain.first < domain.second)) {
    throw DomainError("deterministic_energy: empty domain");
  }
  RefProblem P;
  P.lam2 = units.lam2();
  P.lo = domain.first;
  P.hi = domain.second;
  P.xr = linspace(P.lo, P.hi, n_ref);
  P.vr.resize(n_ref);
  for (int i = 0; i < n_ref; ++i) P.vr[i] = V(P.xr[i]);
  return P.det_energy(m);
}

SampleEnsemble cg_step(const SampleEnsemble& ensemble, const GaussianMixture& m,
                       const PotentialFunctions& pot, const ModelUnits& units,
                       const StepConfig& cfg, std::pair<double, double> domain) {
  if (ensemble.points.size() == 0) {
    throw EmptyEnsemble("cg_step: ensemble has no points");
  }
  const std::function<double(double)> dv =
      pot.dV ? pot.dV : make_derivative(pot.V);
  RefProblem P;
  P.lam2 = units.lam2();
  P.lo = domain.first;
  P.hi = domain.second;
  P.V = &pot.V;
  P.dV = &dv;

  Eigen::ArrayXd E, g;
  P.eq(m, ensemble.points, E, g);
  const Eigen::ArrayXd d = -g;

  const Eigen::ArrayXd rho0 = mixture_derivs(m, ensemble.points).r0.max(kTiny);
  const Eigen::ArrayXd wq = quad_weights(ensemble.points) * rho0;
  const double m0 = (wq * E).sum() / std::max(wq.sum(), kTiny);

  double alpha = cfg.step_size;
  for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
    const Eigen::ArrayXd trial =
        (ensemble.points +
         (alpha * d).min(cfg.displacement_cap).max(-cfg.displacement_cap))
            .min(P.hi)
            .max(P.lo);
    Eigen::ArrayXd Et, gt;
    P.eq(m, trial, Et, gt);
    const Eigen::ArrayXd rt = mixture_derivs(m, trial).r0.max(kTiny);
    const Eigen::ArrayXd wt = quad_weights(trial) * rt;
    const double mt = (wt * Et).sum() / std::max(wt.sum(), kTiny);
    if (mt <= m0) {
      SampleEnsemble out;
      out.points = trial;
      out.weights = ensemble.weights;
      return out;
    }
    alpha *= 0.5;
  }
  throw LineSearchFailure("cg_step: no acceptable step after " +
                          std::to_string(cfg.max_backtracks) + " backtracks");
}

double locate_node(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& vals) {
  const int n = static_cast<int>(xs.size());
  if (n < 2) throw NodeCountError(0, "locate_node: fewer than two samples");
  int count = 0;
  double node = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    if (vals[i] == 0.0) {
      // An exact zero is a node by itself; skip a paired sign test around it.
      if (i > 0 && vals[i - 1] == 0.0) continue;
      ++count;
      node = xs[i];
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (vals[i] * vals[i + 1] < 0.0) {
      ++count;
      node = xs[i] - vals[i] * (xs[i + 1] - xs[i]) / (vals[i + 1] - vals[i]);
    }
  }
  if (count != 1) {
    throw NodeCountError(count, "locate_node: expected exactly one sign change, found " +
                                    std::to_string(count));
  }
  return node;
}

double locate_node(const RealField& psi) {
  const Eigen::ArrayXd xs = Eigen::Map<const Eigen::ArrayXd>(
      psi.grid.points.data(), static_cast<int>(psi.grid.points.size()));
  return locate_node(xs, psi.values.array());
}

OptimizeResult optimize_ground_state(const PotentialFunctions& pot,
                                     std::pair<double, double> domain,
                                     const OptimizerConfig& config,
                                     const ModelUnits& units,
                                     const NodeProbe& node_probe,
                                     const GaussianMixture* initial) {
  if (!pot.V) throw EmptyEnsemble("optimize_ground_state: potential callable is empty");
  if (!(domain.first < domain.second)) {
    throw DomainError("optimize_ground_state: empty domain");
  }
  if (config.n_gaussians < 1 || config.n_points < 1) {
    throw EmptyEnsemble("optimize_ground_state: need at least one component and one point");
  }

  const std::function<double(double)> dv =
      pot.dV ? pot.dV : make_derivative(pot.V);

  RefProblem P;
  P.lam2 = units.lam2();
  P.lo = domain.first;
  P.hi = domain.second;
  P.xr = linspace(P.lo, P.hi, kRefPoints);
  P.vr.resize(kRefPoints);
  for (int i = 0; i < kRefPoints; ++i) P.vr[i] = pot.V(P.xr[i]);
  P.V = &pot.V;
  P.dV = &dv;
  const double hr = P.xr[1] - P.xr[0];
  const double floor = (0.75 * hr) * (0.75 * hr);

  // Classically allowed window at the grid ground energy: hull of the
  // reference points with V <= E0. Start the components spread across it.
  Grid1D ref_grid = make_grid(P.lo, P.hi, kRefPoints);
  Eigen::MatrixXd H = kinetic_matrix(ref_grid, units);
  for (int i = 0; i < kRefPoints; ++i) H(i, i) += P.vr[i];
  const double e0 = symmetric_lowest(H, 1).first[0];
  double init_lo = 0.0, init_hi = 0.0;
  {
    bool any = false;
    for (int i = 0; i < kRefPoints; ++i) {
      if (P.vr[i] <= e0) {
        if (!any) {
          init_lo = P.xr[i];
          any = true;
        }
        init_hi = P.xr[i];
      }
    }
    if (!any || !(init_lo < init_hi)) {
      init_lo = P.lo + 0.25 * (P.hi - P.lo);
      init_hi = P.lo + 0.75 * (P.hi - P.lo);
    }
  }

  const int N = config.n_gaussians;
  const int n_p = config.n_points;
  const Eigen::ArrayXd cts = linspace(init_lo, init_hi, N);
  const double w0 = (init_hi - init_lo) / static_cast<double>(N);

  GaussianMixture mix;
  if (initial != nullptr) {
    mix = *initial;
  } else {
    mix.components.resize(N);
    for (int k = 0; k < N; ++k) {
      mix.components[k].c0 = 1.0;
      mix.components[k].c2 = 1.0 / (2.0 * w0 * w0);
      mix.components[k].c3 = cts[k];
    }
  }

  DeterministicRng rng(static_cast<uint64_t>(config.seed));
  Eigen::ArrayXd pts(n_p);
  std::vector<int> comp(n_p);
  for (int i = 0; i < n_p; ++i) comp[i] = rng.uniform_int(N);
  for (int i = 0; i < n_p; ++i) {
    pts[i] = std::clamp(cts[comp[i]] + w0 * rng.normal(), P.lo, P.hi);
  }

  double curE = P.det_energy(mix);

  OptimizeResult result;
  result.trace.records.push_back(
      {0, curE, mixture_hash(mix), std::numeric_limits<double>::quiet_NaN()});

  Eigen::ArrayXd d, gprev;
  double alpha = config.cg_step_size;
  double s = kCompassStart;
  int quiet = 0;
  int step = 0;
  const double cap = config.displacement_cap;

  for (step = 0; step < config.max_cg_steps; ++step) {
    Eigen::ArrayXd E, g;
    P.eq(mix, pts, E, g);
    if (step == 0 || step % kRestartPeriod == 0) {
      d = -g;
    } else {
      Eigen::ArrayXd beta =
          (g * (g - gprev) / gprev.square().max(kTiny)).max(0.0);
      d = -g + beta * d;
    }
    gprev = g;

    Eigen::ArrayXd rho0 = mixture_derivs(mix, pts).r0.max(kTiny);
    Eigen::ArrayXd wq = quad_weights(pts) * rho0;
    const double m0 = (wq * E).sum() / std::max(wq.sum(), kTiny);

    alpha = std::min(alpha * 1.5, config.cg_step_size);
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::ArrayXd trial =
          (pts + (alpha * d).min(cap).max(-cap)).min(P.hi).max(P.lo);
      Eigen::ArrayXd Et, gt;
      P.eq(mix, trial, Et, gt);
      const Eigen::ArrayXd rt = mixture_derivs(mix, trial).r0.max(kTiny);
      const Eigen::ArrayXd wt = quad_weights(trial) * rt;
      const double mt = (wt * Et).sum() / std::max(wt.sum(), kTiny);
      if (mt <= m0) {
        pts = trial;
        E = Et;
        break;
      }
      alpha *= 0.5;
    }

    rho0 = mixture_derivs(mix, pts).r0.max(kTiny);
    wq = quad_weights(pts) * rho0;
    const double emin = E.minCoeff();
    const double emean = (wq * E).sum() / std::max(wq.sum(), kTiny);
    const double spread = std::max(emean - emin, 1e-30);
    const Eigen::ArrayXd wts =
        wq * (-(kBoltzmannKappa / spread) * (E - emin)).exp();

    Eigen::ArrayXd pi, mu, var, pi2, mu2, var2;
    {
      GaussianMixture em_mix = mix;
      for (int round = 0; round < std::max(config.em_iterations, 1); ++round) {
        Eigen::ArrayXd pi_t, mu_t, var_t;
        detail::em_responsibilities(pts, wts, em_mix, pi_t, mu_t, var_t, pi2,
                                    mu2, var2);
        if (round == 0) {
          pi = pi_t;
          mu = mu_t;
          var = var_t;
        }
        if (round + 1 < std::max(config.em_iterations, 1)) {
          em_mix = mk(pi2, mu2, var2, floor);
        }
      }
    }

    bool have_new = false;
    GaussianMixture newM;
    double newE = curE;

    // Blend cascade toward the EM target, most aggressive first; accept the
    // best candidate from the first block that improves <E>.
    struct Block {
      const Eigen::ArrayXd* p;
      const Eigen::ArrayXd* m;
      const Eigen::ArrayXd* v;
    };
    const Block blocks[3] = {{&pi2, &mu2, &var2}, {&pi2, &mu2, &var}, {&pi2, &mu, &var}};
    const double gammas[2] = {1.0, 0.25};
    for (const Block& b : blocks) {
      bool got = false;
      for (double gamma : gammas) {
        const Eigen::ArrayXd pib = (1.0 - gamma) * pi + gamma * (*b.p);
        const Eigen::ArrayXd mub = (1.0 - gamma) * mu + gamma * (*b.m);
        const Eigen::ArrayXd varb =
            ((1.0 - gamma) * var.log() + gamma * b.v->max(kTiny).log()).exp();
        const GaussianMixture cand = mk(pib / pib.sum(), mub, varb, floor);
        const double e = P.det_energy(cand);
        if (e < newE) {
          newE = e;
          newM = cand;
          have_new = true;
          got = true;
        }
      }
      if (got) break;
    }

    if (!have_new) {
      GaussianMixture cs;
      double csE = 0.0;
      if (coord_sweep(P, pi, mu, var, pi2, mu2, var2, curE, floor, cs, csE)) {
        newM = cs;
        newE = csE;
        have_new = true;
      }
    }

    if (!have_new && s >= kCompassMin) {
      GaussianMixture cp;
      double cpE = 0.0;
      if (compass_sweep(P, mix, curE, floor, s, cp, cpE)) {
        newM = cp;
        newE = cpE;
        have_new = true;
      } else {
        s *= 0.5;
      }
    }

    const double dstep = curE - newE;
    if (have_new) {
      mix = newM;
      curE = newE;
    }

    quiet = (dstep < config.energy_tolerance) ? quiet + 1 : 0;

    double node = std::numeric_limits<double>::quiet_NaN();
    if (node_probe) node = node_probe(mix);
    result.trace.records.push_back({step + 1, curE, mixture_hash(mix), node});

    if (quiet >= kQuietWindow) {
      result.converged = true;
      ++step;
      break;
    }
  }

  result.mixture = mix;
  result.energy = curE;
  result.steps_taken = step;

  if (!result.converged) {
    throw MaxStepsExceeded(
        "optimize_ground_state: no convergence within " +
            std::to_string(config.max_cg_steps) + " steps",
        result);
  }
  return result;
}

}  // namespace susyqm
