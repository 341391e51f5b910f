#include "susyqm/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace susyqm {

namespace {

constexpr double TINY = 1e-300;

struct EmParams {
  Eigen::ArrayXd pi, mu, var;
};

EmParams params_of(const GaussianMixture& m) {
  const int N = m.size();
  EmParams p;
  p.pi.resize(N);
  p.mu.resize(N);
  p.var.resize(N);
  for (int k = 0; k < N; ++k) {
    const auto& c = m.components[static_cast<size_t>(k)];
    p.pi[k] = c.c0 * std::sqrt(M_PI / c.c2);
    p.mu[k] = c.c3;
    p.var[k] = 1.0 / (2.0 * c.c2);
  }
  const double s = p.pi.sum();
  if (s > 0.0) p.pi /= s;
  return p;
}

GaussianMixture mixture_of(const EmParams& p) {
  GaussianMixture m;
  const int N = static_cast<int>(p.pi.size());
  m.components.resize(static_cast<size_t>(N));
  for (int k = 0; k < N; ++k) {
    const double c2 = 1.0 / (2.0 * p.var[k]);
    m.components[static_cast<size_t>(k)] = {p.pi[k] * std::sqrt(c2 / M_PI), c2,
                                            p.mu[k]};
  }
  return m;
}

}  // namespace

double GaussianMixture::integral() const {
  double s = 0.0;
  for (const auto& c : components) s += c.c0 * std::sqrt(M_PI / c.c2);
  return s;
}

void GaussianMixture::normalize() {
  const double s = integral();
  if (!(s > 0.0)) {
    throw DegenerateDensity("cannot normalize mixture with non-positive integral");
  }
  for (auto& c : components) c.c0 /= s;
}

MixtureDerivs mixture_derivs(const GaussianMixture& m, const Eigen::ArrayXd& x) {
  const auto n = x.size();
  MixtureDerivs d;
  d.r0 = Eigen::ArrayXd::Zero(n);
  d.r1 = Eigen::ArrayXd::Zero(n);
  d.r2 = Eigen::ArrayXd::Zero(n);
  d.r3 = Eigen::ArrayXd::Zero(n);
  for (const auto& c : m.components) {
    const double t = c.c2;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dx = x[i] - c.c3;
      const double g = c.c0 * std::exp(-t * dx * dx);
      d.r0[i] += g;
      d.r1[i] += -2.0 * t * dx * g;
      d.r2[i] += (4.0 * t * t * dx * dx - 2.0 * t) * g;
      d.r3[i] += (-8.0 * t * t * t * dx * dx * dx + 12.0 * t * t * dx) * g;
    }
  }
  return d;
}

double mixture_density(const GaussianMixture& m, double x) {
  double s = 0.0;
  for (const auto& c : m.components) {
    const double dx = x - c.c3;
    s += c.c0 * std::exp(-c.c2 * dx * dx);
  }
  return s;
}

double quantum_potential(const GaussianMixture& m, double x, const ModelUnits& units) {
  Eigen::ArrayXd xs(1);
  xs[0] = x;
  const MixtureDerivs d = mixture_derivs(m, xs);
  if (d.r0[0] < TINY) {
    throw DegenerateDensity("quantum_potential: density underflow at sample point");
  }
  const double u1 = d.r1[0] / d.r0[0];
  const double u2 = d.r2[0] / d.r0[0] - u1 * u1;
  return -units.lam2() * (0.5 * u2 + 0.25 * u1 * u1);
}

double local_energy(const std::function<double(double)>& V, const GaussianMixture& m,
                    double x, const ModelUnits& units) {
  return V(x) + quantum_potential(m, x, units);
}

SampleEnsemble make_ensemble(const Eigen::ArrayXd& points) {
  SampleEnsemble e;
  e.points = points;
  e.weights = Eigen::ArrayXd::Constant(points.size(), 1.0);
  return e;
}

double energy_functional(const std::function<double(double)>& V,
                         const GaussianMixture& m, const SampleEnsemble& ensemble,
                         const ModelUnits& units) {
  if (ensemble.points.size() == 0) {
    throw EmptyEnsemble("energy_functional: no sample points");
  }
  const double wsum = ensemble.weights.sum();
  if (!(wsum > 0.0)) {
    throw EmptyEnsemble("energy_functional: total weight is not positive");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ensemble.points.size(); ++i) {
    acc += ensemble.weights[i] * local_energy(V, m, ensemble.points[i], units);
  }
  return acc / wsum;
}

namespace detail {

// Weighted responsibilities + updated parameters, shared by em_refit and the
// optimizer refit stage. Returns both the parameters read off `mix` and the
// EM-updated targets.
void em_responsibilities(const Eigen::ArrayXd& pts, const Eigen::ArrayXd& wts,
                         const GaussianMixture& mix, Eigen::ArrayXd& pi,
                         Eigen::ArrayXd& mu, Eigen::ArrayXd& var,
                         Eigen::ArrayXd& pi2, Eigen::ArrayXd& mu2,
                         Eigen::ArrayXd& var2) {
  const EmParams p = params_of(mix);
  pi = p.pi;
  mu = p.mu;
  var = p.var;
  const int N = static_cast<int>(pi.size());
  const Eigen::Index n = pts.size();
  const Eigen::ArrayXd wn = wts / wts.sum();

  Eigen::ArrayXd logpi(N), lognorm(N);
  for (int k = 0; k < N; ++k) {
    logpi[k] = std::log(std::max(pi[k], TINY));
    lognorm[k] = -0.5 * std::log(2.0 * M_PI * var[k]);
  }

  Eigen::ArrayXd Nk = Eigen::ArrayXd::Zero(N);
  Eigen::ArrayXd sx = Eigen::ArrayXd::Zero(N);
  Eigen::MatrixXd Rw(n, N);
  Eigen::ArrayXd logp(N);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < N; ++k) {
      const double d = pts[i] - mu[k];
      logp[k] = logpi[k] + lognorm[k] - 0.5 * d * d / var[k];
    }
    const double mx = logp.maxCoeff();
    double rs = 0.0;
    for (int k = 0; k < N; ++k) {
      logp[k] = std::exp(logp[k] - mx);
      rs += logp[k];
    }
    for (int k = 0; k < N; ++k) {
      const double rw = (logp[k] / rs) * wn[i];
      Rw(i, k) = rw;
      Nk[k] += rw;
      sx[k] += rw * pts[i];
    }
  }
  Nk += TINY;
  pi2 = Nk / Nk.sum();
  mu2 = sx / Nk;
  var2 = Eigen::ArrayXd::Zero(N);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < N; ++k) {
      const double d = pts[i] - mu2[k];
      var2[k] += Rw(i, k) * d * d;
    }
  }
  var2 /= Nk;
}

}  // namespace detail

GaussianMixture em_refit(const SampleEnsemble& ensemble, int N,
                         const GaussianMixture& previous, const EmOptions& opts) {
  const Eigen::Index n_p = ensemble.points.size();
  if (n_p == 0) {
    throw EmptyEnsemble("em_refit: no sample points");
  }
  if (previous.size() != N || N < 1) {
    throw DomainError("em_refit: previous mixture must have N >= 1 components");
  }
  if (n_p < N) {
    throw DomainError("em_refit: need at least N sample points");
  }
  double spacing = opts.spacing_hint;
  if (spacing <= 0.0) {
    spacing = (n_p > 1)
                  ? (ensemble.points.maxCoeff() - ensemble.points.minCoeff()) /
                        static_cast<double>(n_p - 1)
                  : 1.0;
  }
  const double var_min = 0.5 * (opts.collapse_eps * spacing) *
                         (opts.collapse_eps * spacing);  // c2 <= 1/(eps*h)^2

  GaussianMixture current = previous;
  for (int round = 0; round < std::max(1, opts.rounds); ++round) {
    Eigen::ArrayXd pi, mu, var, pi2, mu2, var2;
    detail::em_responsibilities(ensemble.points, ensemble.weights, current, pi, mu,
                                var, pi2, mu2, var2);
    for (int k = 0; k < N; ++k) {
      if (var2[k] < var_min) {
        // Reseed the collapsed component at the widest gap between the
        // surviving centers, then report the collapse.
        Eigen::ArrayXd mu_r = mu2, var_r = var2, pi_r = pi2;
        std::vector<double> centers;
        for (int j = 0; j < N; ++j) {
          if (j != k) centers.push_back(mu2[j]);
        }
        double lo = ensemble.points.minCoeff();
        double hi = ensemble.points.maxCoeff();
        double gap_lo = lo, gap_hi = hi;
        if (centers.size() >= 2) {
          std::sort(centers.begin(), centers.end());
          double best = -1.0;
          for (size_t j = 0; j + 1 < centers.size(); ++j) {
            const double g = centers[j + 1] - centers[j];
            if (g > best) {
              best = g;
              gap_lo = centers[j];
              gap_hi = centers[j + 1];
            }
          }
        }
        mu_r[k] = 0.5 * (gap_lo + gap_hi);
        const double half = std::max(0.5 * (gap_hi - gap_lo), spacing);
        var_r[k] = half * half;
        pi_r /= pi_r.sum();
        GaussianMixture reseeded = mixture_of({pi_r, mu_r, var_r});
        reseeded.normalize();
        throw CollapsedComponent(
            "em_refit: component " + std::to_string(k) + " collapsed (var " +
                std::to_string(var2[k]) + " below guard)",
            std::move(reseeded), k);
      }
    }
    current = mixture_of({pi2, mu2, var2});
  }
  current.normalize();
  return current;
}

double mixture_log_likelihood(const SampleEnsemble& ensemble,
                              const GaussianMixture& m) {
  if (ensemble.points.size() == 0) {
    throw EmptyEnsemble("mixture_log_likelihood: no sample points");
  }
  const EmParams p = params_of(m);
  const int N = static_cast<int>(p.pi.size());
  const Eigen::ArrayXd wn = ensemble.weights / ensemble.weights.sum();
  Eigen::ArrayXd logp(N);
  double total = 0.0;
  for (Eigen::Index i = 0; i < ensemble.points.size(); ++i) {
    for (int k = 0; k < N; ++k) {
      const double d = ensemble.points[i] - p.mu[k];
      logp[k] = std::log(std::max(p.pi[k], TINY)) -
                0.5 * std::log(2.0 * M_PI * p.var[k]) - 0.5 * d * d / p.var[k];
    }
    const double mx = logp.maxCoeff();
    total += wn[i] * (mx + std::log((logp - mx).exp().sum()));
  }
  return total;
}

std::string mixture_hash(const GaussianMixture& m) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a offset basis
  auto feed = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  };
  for (const auto& c : m.components) {
    feed(c.c0);
    feed(c.c2);
    feed(c.c3);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace susyqm
