#include "susyqm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>
#include <utility>

#include <Eigen/Dense>

#include "susyqm/convergence.hpp"
#include "susyqm/eigensolve.hpp"
#include "susyqm/errors.hpp"
#include "susyqm/grid.hpp"
#include "susyqm/grid2d.hpp"
#include "susyqm/hierarchy.hpp"
#include "susyqm/io.hpp"
#include "susyqm/models.hpp"
#include "susyqm/multidim.hpp"
#include "susyqm/operators.hpp"
#include "susyqm/propagation.hpp"
#include "susyqm/scattering.hpp"
#include "susyqm/superpotential.hpp"
#include "susyqm/units.hpp"
#include "susyqm/version.hpp"

namespace susyqm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ------------------------------------------------------------ config access

const json& require(const json& cfg, const std::string& key) {
  if (!cfg.is_object() || !cfg.contains(key)) {
    throw ConfigError("missing config key: " + key);
  }
  return cfg.at(key);
}

double num(const json& cfg, const std::string& key) {
  const json& v = require(cfg, key);
  if (!v.is_number()) throw ConfigError("config key must be a number: " + key);
  return v.get<double>();
}

double num_or(const json& cfg, const std::string& key, double dflt) {
  if (!cfg.is_object() || !cfg.contains(key)) return dflt;
  return num(cfg, key);
}

long long integer(const json& cfg, const std::string& key) {
  const json& v = require(cfg, key);
  if (!v.is_number_integer()) {
    throw ConfigError("config key must be an integer: " + key);
  }
  return v.get<long long>();
}

long long int_or(const json& cfg, const std::string& key, long long dflt) {
  if (!cfg.is_object() || !cfg.contains(key)) return dflt;
  return integer(cfg, key);
}

std::string str(const json& cfg, const std::string& key) {
  const json& v = require(cfg, key);
  if (!v.is_string()) throw ConfigError("config key must be a string: " + key);
  return v.get<std::string>();
}

bool bool_or(const json& cfg, const std::string& key, bool dflt) {
  if (!cfg.is_object() || !cfg.contains(key)) return dflt;
  const json& v = cfg.at(key);
  if (!v.is_boolean()) throw ConfigError("config key must be a boolean: " + key);
  return v.get<bool>();
}

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

// One experiment's file outputs plus its scalar report.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;  // name, sha256
  json report;
  json tolerances;
};

void emit_csv(Outputs& out, const fs::path& dir, const std::string& name,
              const std::vector<CsvColumn>& columns) {
  write_csv(dir / name, columns);
  out.files.emplace_back(name, sha256_hex(read_file_bytes(dir / name)));
}

Potential1D named_model(const std::string& name, const std::string& where) {
  if (name == "harmonic") return harmonic_model();
  if (name == "sextic") return sextic_model();
  throw ConfigError(where + ": unknown model '" + name + "'");
}

// --------------------------------------------------------------- double well

struct MixturePartner {
  GaussianMixture mixture;
  double lam = 1.0;

  // W = -(lam/2) (ln rho)', plus first and second derivatives, from the
  // cumulant ratios of the mixture density.
  void core(double x, double& w, double& wp, double& wpp) const {
    Eigen::ArrayXd xs(1);
    xs[0] = x;
    const MixtureDerivs d = mixture_derivs(mixture, xs);
    const double r0 = std::max(d.r0[0], 1e-300);
    const double u1 = d.r1[0] / r0;
    const double u2 = d.r2[0] / r0 - u1 * u1;
    const double u3 = d.r3[0] / r0 - 3.0 * u1 * u2 - u1 * u1 * u1;
    w = -0.5 * lam * u1;
    wp = -0.5 * lam * u2;
    wpp = -0.5 * lam * u3;
  }

  double v2(double x) const {
    double w, wp, wpp;
    core(x, w, wp, wpp);
    return w * w + lam * wp;
  }

  double dv2(double x) const {
    double w, wp, wpp;
    core(x, w, wp, wpp);
    return 2.0 * w * wp + lam * wpp;
  }
};

OptimizeResult run_or_carry(const PotentialFunctions& pot,
                            std::pair<double, double> domain,
                            const OptimizerConfig& cfg, const ModelUnits& units,
                            const NodeProbe& probe, bool& max_steps) {
  try {
    OptimizeResult r = optimize_ground_state(pot, domain, cfg, units, probe);
    max_steps = false;
    return r;
  } catch (const MaxStepsExceeded& e) {
    max_steps = true;
    return e.best;
  }
}

}  // namespace

DoubleWellOutcome run_double_well_pipeline(const DoubleWellParams& params) {
  const ModelUnits units = ModelUnits::atomic(params.mass_au);
  const double hc = HARTREE_CM1;
  const double lam = units.lam();
  const Potential1D model = quartic_doublewell_model(
      params.a_cm1 / hc, params.b_cm1 / hc, params.e0_cm1 / hc);

  DoubleWellOutcome out;

  const Grid1D grid = make_grid(params.x_min, params.x_max, params.n);
  const RealField v1 = sample_field(grid, model.V);
  {
    const Eigen::MatrixXd h = hamiltonian_matrix(grid, v1, units);
    const auto [ev, vec] = symmetric_lowest(h, 2);
    out.e0_dvr = ev[0];
    out.e1_dvr = ev[1];
    out.delta_dvr = ev[1] - ev[0];
  }

  const PotentialFunctions p1{model.V, model.dV};
  OptimizerConfig c1 = params.opt;
  out.sector1 = run_or_carry(p1, {params.x_min, params.x_max}, c1, units, {},
                             out.s1_max_steps);
  out.s1_energy = out.sector1.energy;

  const MixturePartner partner{out.sector1.mixture, lam};
  PotentialFunctions p2;
  p2.V = [partner](double x) { return partner.v2(x); };
  p2.dV = [partner](double x) { return partner.dv2(x); };

  {
    const RealField v2g = sample_field(grid, p2.V);
    const Eigen::MatrixXd h2 = hamiltonian_matrix(grid, v2g, units);
    out.v2_dvr_e0 = symmetric_lowest(h2, 1).first[0];
  }

  // Node probe: sector-1 excited state implied by a sector-2 trial mixture,
  // psi1 = (-lam d/dx + W1) psi2, with W1 frozen from the sector-1 fit.
  const int n = grid.n;
  Eigen::ArrayXd xr(n);
  for (int i = 0; i < n; ++i) xr[i] = grid.points[static_cast<size_t>(i)];
  const Eigen::MatrixXd dr = derivative_matrix(grid);
  const MixtureDerivs db = mixture_derivs(out.sector1.mixture, xr);
  const Eigen::ArrayXd wg = -0.5 * lam * (db.r1 / db.r0.max(1e-300));
  const double window = params.node_window;
  NodeProbe probe = [xr, dr, wg, lam, n, window](const GaussianMixture& mx) {
    const MixtureDerivs d = mixture_derivs(mx, xr);
    const double nc = mx.integral();
    const Eigen::ArrayXd psi2 = (d.r0.max(0.0) / nc).sqrt();
    const Eigen::VectorXd psi1 =
        -lam * (dr * psi2.matrix()) + (wg * psi2).matrix();
    std::vector<double> xs, vs;
    for (int i = 0; i < n; ++i) {
      if (std::abs(xr[i]) < window) {
        xs.push_back(xr[i]);
        vs.push_back(psi1[i]);
      }
    }
    Eigen::ArrayXd xsv =
        Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<long>(xs.size()));
    Eigen::ArrayXd vsv =
        Eigen::Map<Eigen::ArrayXd>(vs.data(), static_cast<long>(vs.size()));
    try {
      return locate_node(xsv, vsv);
    } catch (const NodeCountError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  OptimizerConfig c2 = params.opt;
  c2.seed = params.opt.seed + 1;
  out.sector2 = run_or_carry(p2, {params.x_min, params.x_max}, c2, units,
                             probe, out.s2_max_steps);
  out.s2_energy = out.sector2.energy;
  out.rel_error = std::abs(out.s2_energy - out.delta_dvr) / out.delta_dvr;

  // Node envelope: running max of |node| (NaN probes carry the previous
  // value) must be non-increasing over the final quarter of the trace.
  const auto& rec = out.sector2.trace.records;
  std::vector<double> run_max;
  double rm = 0.0;
  for (size_t i = 1; i < rec.size(); ++i) {
    const double a = std::isnan(rec[i].node) ? 0.0 : std::abs(rec[i].node);
    rm = std::max(rm, a);
    run_max.push_back(rm);
  }
  out.node_envelope_ok = !run_max.empty();
  const size_t q0 = (3 * run_max.size()) / 4;
  for (size_t i = q0 + 1; i < run_max.size(); ++i) {
    if (run_max[i] > run_max[i - 1]) out.node_envelope_ok = false;
  }
  if (rec.size() > 1) out.node_final = rec.back().node;

  const double beta = params.semiclassical_beta;
  const double x0 = params.semiclassical_x0;
  out.semiclassical = semiclassical_splitting(
      [beta, x0](double x) {
        return std::pow(2.0 * beta / M_PI, 0.25) *
               std::exp(-beta * (x - x0) * (x - x0));
      },
      units);
  return out;
}

namespace {

DoubleWellParams parse_double_well(const json& cfg,
                                   std::optional<long long> seed_override) {
  DoubleWellParams p;
  p.mass_au = num_or(cfg, "mass_au", 1837.152646);
  const json& pot = require(cfg, "potential");
  p.a_cm1 = num(pot, "a_cm1");
  p.b_cm1 = num(pot, "b_cm1");
  p.e0_cm1 = num(pot, "e0_cm1");
  const json& grid = require(cfg, "grid");
  p.x_min = num(grid, "x_min");
  p.x_max = num(grid, "x_max");
  p.n = static_cast<int>(integer(grid, "n"));
  const json& opt = require(cfg, "optimizer");
  p.opt.n_gaussians = static_cast<int>(integer(opt, "n_gaussians"));
  p.opt.n_points = static_cast<int>(integer(opt, "n_points"));
  p.opt.max_cg_steps = static_cast<int>(integer(opt, "max_steps"));
  p.opt.energy_tolerance = num_or(opt, "tolerance_hartree", 1e-18);
  // The step scale is stated per cm^-1 of gradient; the pipeline runs in
  // hartree, so the equivalent step is larger by the hartree/cm^-1 ratio.
  p.opt.cg_step_size = num_or(opt, "step_scale_cm1", 2e-5) * HARTREE_CM1;
  p.opt.displacement_cap = num_or(opt, "displacement_cap_bohr", 0.02);
  p.opt.em_iterations = static_cast<int>(int_or(opt, "em_iterations", 1));
  p.opt.seed = seed_override.value_or(int_or(cfg, "seed", 2024));
  p.node_window = num_or(cfg, "node_window_bohr", 1.5);
  if (cfg.contains("semiclassical")) {
    const json& sc = cfg.at("semiclassical");
    p.semiclassical_beta = num_or(sc, "beta", p.semiclassical_beta);
    p.semiclassical_x0 = num_or(sc, "x0", p.semiclassical_x0);
  }
  check(p.mass_au > 0.0, "double_well: mass_au must be > 0");
  check(p.x_min < p.x_max, "double_well: grid needs x_min < x_max");
  check(p.n >= 5, "double_well: grid n must be >= 5");
  check(p.opt.n_gaussians >= 1, "double_well: n_gaussians must be >= 1");
  check(p.opt.n_points >= 2, "double_well: n_points must be >= 2");
  check(p.opt.max_cg_steps >= 1, "double_well: max_steps must be >= 1");
  check(p.opt.energy_tolerance > 0.0, "double_well: tolerance must be > 0");
  check(p.opt.cg_step_size > 0.0, "double_well: step_scale_cm1 must be > 0");
  check(p.opt.displacement_cap > 0.0,
        "double_well: displacement_cap_bohr must be > 0");
  check(p.opt.em_iterations >= 1, "double_well: em_iterations must be >= 1");
  check(p.node_window > 0.0, "double_well: node_window_bohr must be > 0");
  return p;
}

Outputs run_double_well(const DoubleWellParams& p, const fs::path& dir) {
  const DoubleWellOutcome r = run_double_well_pipeline(p);
  const double hc = HARTREE_CM1;

  Outputs out;
  {
    std::vector<double> step1, en1;
    for (const auto& t : r.sector1.trace.records) {
      step1.push_back(static_cast<double>(t.step));
      en1.push_back(t.energy * hc);
    }
    emit_csv(out, dir, "trace_sector1.csv",
             {{"step (1)", step1}, {"energy (cm^-1)", en1}});
  }
  {
    std::vector<double> step2, en2, node, runmax;
    double rm = 0.0;
    bool first = true;
    for (const auto& t : r.sector2.trace.records) {
      step2.push_back(static_cast<double>(t.step));
      en2.push_back(t.energy * hc);
      node.push_back(t.node);
      if (first) {
        runmax.push_back(std::numeric_limits<double>::quiet_NaN());
        first = false;
      } else {
        if (!std::isnan(t.node)) rm = std::max(rm, std::abs(t.node));
        runmax.push_back(rm);
      }
    }
    emit_csv(out, dir, "trace_sector2.csv",
             {{"step (1)", step2},
              {"energy (cm^-1)", en2},
              {"node (bohr)", node},
              {"node_running_max (bohr)", runmax}});
  }
  {
    const Grid1D grid = make_grid(p.x_min, p.x_max, p.n);
    const Potential1D model = quartic_doublewell_model(
        p.a_cm1 / hc, p.b_cm1 / hc, p.e0_cm1 / hc);
    const MixturePartner partner{r.sector1.mixture,
                                 ModelUnits::atomic(p.mass_au).lam()};
    std::vector<double> xs, v1s, v2s;
    for (double x : grid.points) {
      xs.push_back(x);
      v1s.push_back(model.V(x) * hc);
      v2s.push_back(partner.v2(x) * hc);
    }
    emit_csv(out, dir, "potentials.csv",
             {{"x (bohr)", xs},
              {"v1 (cm^-1)", v1s},
              {"v2_mixture (cm^-1)", v2s}});
  }

  out.report = {
      {"experiment", "double_well"},
      {"seed", p.opt.seed},
      {"e0_dvr_cm1", r.e0_dvr * hc},
      {"e1_dvr_cm1", r.e1_dvr * hc},
      {"delta_dvr_cm1", r.delta_dvr * hc},
      {"sector1_energy_cm1", r.s1_energy * hc},
      {"sector1_excess_cm1", (r.s1_energy - r.e0_dvr) * hc},
      {"sector1_steps", r.sector1.steps_taken},
      {"sector1_max_steps_reached", r.s1_max_steps},
      {"v2_dvr_e0_cm1", r.v2_dvr_e0 * hc},
      {"sector2_energy_cm1", r.s2_energy * hc},
      {"sector2_steps", r.sector2.steps_taken},
      {"sector2_max_steps_reached", r.s2_max_steps},
      {"relative_error", r.rel_error},
      {"node_final_bohr", finite_or_null(r.node_final)},
      {"node_envelope_ok", r.node_envelope_ok},
      {"semiclassical_delta_cm1", r.semiclassical * hc},
  };
  out.tolerances = {
      {"energy_tolerance_hartree", p.opt.energy_tolerance},
      {"displacement_cap_bohr", p.opt.displacement_cap},
      {"node_window_bohr", p.node_window},
      {"eigensolver_residual", 1e-8},
  };
  return out;
}

// --------------------------------------------------------------- convergence

struct ConvergenceSpec {
  std::string model_name;
  Potential1D model;
  int n_min = 0;
  int n_max = 0;
  int n_ref = 0;
};

ConvergenceSpec parse_convergence(const json& cfg) {
  ConvergenceSpec s;
  s.model_name = str(cfg, "model");
  s.model = named_model(s.model_name, "convergence");
  s.n_min = static_cast<int>(integer(cfg, "n_min"));
  s.n_max = static_cast<int>(integer(cfg, "n_max"));
  s.n_ref = static_cast<int>(int_or(cfg, "n_reference", 301));
  check(s.n_min >= 5, "convergence: n_min must be >= 5");
  check(s.n_max >= s.n_min, "convergence: need n_max >= n_min");
  check(s.n_ref > s.n_max, "convergence: n_reference must exceed n_max");
  return s;
}

Outputs run_convergence(const ConvergenceSpec& s, const fs::path& dir) {
  std::vector<int> ns;
  for (int n = s.n_min; n <= s.n_max; ++n) ns.push_back(n);

  const ModelUnits units = ModelUnits::dimensionless();
  const ConvergenceTable table = convergence_study(s.model, ns, s.n_ref, units);

  Outputs out;
  std::vector<double> col_n, e1, e2, l1, l2;
  bool all_better = true;
  for (const auto& row : table.rows) {
    col_n.push_back(row.n);
    e1.push_back(row.err1_1);
    e2.push_back(row.err0_2);
    l1.push_back(row.eps1_1);
    l2.push_back(row.eps0_2);
    if (!(row.eps0_2 < row.eps1_1)) all_better = false;
  }
  emit_csv(out, dir, "convergence.csv",
           {{"n (1)", col_n},
            {"err_e1_sector1 (1)", e1},
            {"err_e0_sector2 (1)", e2},
            {"log10_err_e1_sector1 (1)", l1},
            {"log10_err_e0_sector2 (1)", l2}});

  out.report = {
      {"experiment", "convergence"},
      {"model", s.model_name},
      {"n_min", s.n_min},
      {"n_max", s.n_max},
      {"n_reference", s.n_ref},
      {"e1_sector1_reference", table.e1_sector1_reference},
      {"e0_sector2_reference", table.e0_sector2_reference},
      {"median_error_ratio", median_error_ratio(table)},
      {"all_rows_improved", all_better},
  };
  out.tolerances = {{"error_floor", 1e-16}, {"eigensolver_residual", 1e-8}};
  return out;
}

// ------------------------------------------------------------------- scatter

struct ScatterCase {
  std::string name;
  double offset = 0.0;
  double amp = 0.0;
  double rate = 0.0;
  double half_width = 0.0;
  int n = 0;
  std::vector<double> reflectionless_energies;
};

struct ScatterSpec {
  std::vector<ScatterCase> cases;
  int n_energies = 0;
  double margin = 0.0;
  double span = 0.0;
};

ScatterSpec parse_scatter(const json& cfg) {
  ScatterSpec s;
  const json& cases = require(cfg, "cases");
  check(cases.is_array() && !cases.empty(),
        "scatter: 'cases' must be a non-empty array");
  s.n_energies = static_cast<int>(int_or(cfg, "n_energies", 20));
  s.margin = num_or(cfg, "energy_margin", 0.1);
  s.span = num_or(cfg, "energy_span", 3.9);
  check(s.n_energies >= 2, "scatter: n_energies must be >= 2");
  check(s.margin > 0.0, "scatter: energy_margin must be > 0");
  check(s.span >= 0.0, "scatter: energy_span must be >= 0");
  for (const json& cj : cases) {
    ScatterCase c;
    c.name = str(cj, "name");
    check(!c.name.empty() &&
              c.name.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                                       "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
                                       "0123456789_-") == std::string::npos,
          "scatter: case name must be alphanumeric/underscore/dash");
    for (const ScatterCase& prev : s.cases) {
      check(prev.name != c.name, "scatter: duplicate case name " + c.name);
    }
    c.offset = num(cj, "offset");
    c.amp = num(cj, "amp");
    c.rate = num(cj, "rate");
    c.half_width = num(cj, "half_width");
    c.n = static_cast<int>(integer(cj, "n"));
    check(c.half_width > 0.0, "scatter: half_width must be > 0");
    check(c.n >= 50, "scatter: n must be >= 50");
    if (cj.contains("reflectionless_energies")) {
      const json& re = cj.at("reflectionless_energies");
      check(re.is_array(), "scatter: reflectionless_energies must be an array");
      for (const json& ej : re) {
        check(ej.is_number(),
              "scatter: reflectionless_energies entries must be numbers");
        c.reflectionless_energies.push_back(ej.get<double>());
      }
    }
    s.cases.push_back(std::move(c));
  }
  return s;
}

Outputs run_scatter(const ScatterSpec& s, const fs::path& dir) {
  const ModelUnits units = ModelUnits::dimensionless();
  Outputs out;
  json case_reports = json::array();

  for (const ScatterCase& cs : s.cases) {
    const Grid1D grid = make_grid(-cs.half_width, cs.half_width, cs.n);
    Eigen::VectorXd wv(cs.n);
    for (int i = 0; i < cs.n; ++i) {
      wv[i] = cs.offset +
              cs.amp * std::tanh(cs.rate * grid.points[static_cast<size_t>(i)]);
    }
    SuperPotential w = superpotential_from_samples(grid, wv, units);
    const AsymptoticLevels lv = asymptotic_levels(w);
    const RealField v1 = riccati_potential(w, RiccatiSign::minus);
    const RealField v2 = riccati_potential(w, RiccatiSign::plus);
    const double chmax = std::max(lv.left * lv.left, lv.right * lv.right);

    std::vector<double> es, ks, kps, r1s, t1s, r2s, t2s, flux, mapd;
    double max_dr = 0.0, max_dt = 0.0, max_flux = 0.0, max_map = 0.0;
    for (int j = 0; j < s.n_energies; ++j) {
      const double e = chmax + s.margin + s.span * j / (s.n_energies - 1.0);
      const ScatteringAmplitudes a1 = solve_scattering(v1, e, units);
      const ScatteringAmplitudes a2 = solve_scattering(v2, e, units);
      const ScatteringAmplitudes pred = partner_amplitudes(w, a2);
      const double fdef = std::abs(
          std::norm(a1.R) + (a1.k_prime / a1.k) * std::norm(a1.T) - 1.0);
      const double mdef =
          std::max(std::abs(pred.R - a1.R), std::abs(pred.T - a1.T));
      es.push_back(e);
      ks.push_back(a1.k);
      kps.push_back(a1.k_prime);
      r1s.push_back(std::abs(a1.R));
      t1s.push_back(std::abs(a1.T));
      r2s.push_back(std::abs(a2.R));
      t2s.push_back(std::abs(a2.T));
      flux.push_back(fdef);
      mapd.push_back(mdef);
      max_dr = std::max(max_dr, std::abs(std::abs(a1.R) - std::abs(a2.R)));
      max_dt = std::max(max_dt, std::abs(std::abs(a1.T) - std::abs(a2.T)));
      max_flux = std::max(max_flux, fdef);
      max_map = std::max(max_map, mdef);
    }
    emit_csv(out, dir, "amplitudes_" + cs.name + ".csv",
             {{"energy (1)", es},
              {"k_left (1)", ks},
              {"k_right (1)", kps},
              {"abs_r_sector1 (1)", r1s},
              {"abs_t_sector1 (1)", t1s},
              {"abs_r_sector2 (1)", r2s},
              {"abs_t_sector2 (1)", t2s},
              {"flux_defect (1)", flux},
              {"partner_map_defect (1)", mapd}});

    json creport = {
        {"name", cs.name},
        {"w_minus", lv.left},
        {"w_plus", lv.right},
        {"asymptotic_tolerance", w.asym_tol},
        {"max_abs_r_diff", max_dr},
        {"max_abs_t_diff", max_dt},
        {"max_flux_defect", max_flux},
        {"max_partner_map_defect", max_map},
    };
    if (!cs.reflectionless_energies.empty()) {
      json refl = json::array();
      for (double e : cs.reflectionless_energies) {
        const ScatteringAmplitudes a1 = solve_scattering(v1, e, units);
        refl.push_back({{"energy", e}, {"abs_r", std::abs(a1.R)}});
      }
      creport["reflectionless"] = refl;
    }
    case_reports.push_back(creport);
  }

  out.report = {{"experiment", "scatter"},
                {"n_energies", s.n_energies},
                {"energy_margin", s.margin},
                {"energy_span", s.span},
                {"cases", case_reports}};
  out.tolerances = {{"segment_floor", 1e-12},
                    {"flatness_window_fraction", 0.1}};
  return out;
}

// ------------------------------------------------------------------ tensor2d

struct Tensor2dSpec {
  std::string type;
  double coeff = 0.0;
  std::function<double(double, double)> vf;
  double x_min = 0.0;
  double x_max = 0.0;
  int n = 0;
  bool want_sector3 = true;
};

Tensor2dSpec parse_tensor2d(const json& cfg) {
  Tensor2dSpec s;
  const json& pot = require(cfg, "potential");
  s.type = str(pot, "type");
  if (s.type == "harmonic") {
    s.vf = [](double x, double y) { return x * x + y * y; };
  } else if (s.type == "anharmonic_xy") {
    s.coeff = num(pot, "coefficient");
    const double c = s.coeff;
    s.vf = [c](double x, double y) {
      return x * x + y * y + c * x * x * y * y;
    };
  } else {
    throw ConfigError("tensor2d: unknown potential type '" + s.type + "'");
  }
  const json& gj = require(cfg, "grid");
  s.x_min = num(gj, "x_min");
  s.x_max = num(gj, "x_max");
  s.n = static_cast<int>(integer(gj, "n"));
  s.want_sector3 = bool_or(cfg, "sector3", true);
  check(s.x_min < s.x_max, "tensor2d: grid needs x_min < x_max");
  check(s.n >= 8 && s.n <= 96, "tensor2d: grid n must be in [8, 96]");
  return s;
}

Outputs run_tensor2d(const Tensor2dSpec& s, const fs::path& dir) {
  const int n = s.n;
  const ModelUnits units = ModelUnits::dimensionless();
  const Grid2D grid = make_grid2d(s.x_min, s.x_max, n, s.x_min, s.x_max, n);
  const Field2D v = sample_field2d(grid, s.vf);

  Eigen::VectorXd ev;
  Eigen::MatrixXd vecs;
  {
    const Eigen::MatrixXd h = hamiltonian_matrix_2d(grid, v, units);
    std::tie(ev, vecs) = symmetric_lowest(h, 3);
  }
  Eigen::VectorXd psi0 = vecs.col(0);
  if (psi0[grid.idx(n / 2, n / 2)] < 0.0) psi0 = -psi0;

  const VectorField2 w = vector_superpotential(Field2D{grid, psi0}, units);
  const TensorSectorOperator op(w, units);
  const TensorSpectrum ts = tensor_ground_state(op, 1);
  const double gap_direct = ev[1] - ev[0];
  const double mu0 = ts.energies[0];

  // Positive-magnitude combination over the degenerate lowest set.
  const int ndeg = static_cast<int>(ts.states.size());
  const double pmax2 = psi0.array().square().maxCoeff();
  auto margin_of = [&](const VectorField2& t) {
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      const double mag = std::hypot(t.x[i], t.y[i]);
      mx = std::max(mx, mag);
      if (psi0[i] * psi0[i] > 1e-10 * pmax2) mn = std::min(mn, mag);
    }
    return mn / mx;
  };
  VectorField2 best = ts.states[0];
  double best_margin = margin_of(best);
  if (ndeg >= 2) {
    for (int j = 1; j < 32; ++j) {
      const double th = M_PI * j / 32.0;
      VectorField2 t;
      t.grid = grid;
      t.x = std::cos(th) * ts.states[0].x + std::sin(th) * ts.states[1].x;
      t.y = std::cos(th) * ts.states[0].y + std::sin(th) * ts.states[1].y;
      const double m = margin_of(t);
      if (m > best_margin) {
        best_margin = m;
        best = t;
      }
    }
  }

  // Descend the first recovered state into the scalar sector and compare
  // with the direct first-excited subspace.
  const Field2D desc = descend_state(op, ts.states[0], mu0);
  Eigen::VectorXd dv = desc.values / desc.values.norm();
  double ov2 = 0.0;
  for (int j = 1; j < 3; ++j) {
    if (std::abs(ev[j] - ev[1]) <= 1e-6) {
      const double c = dv.dot(vecs.col(j));
      ov2 += c * c;
    }
  }
  const double overlap = std::sqrt(ov2);

  json sector3_report = nullptr;
  bool vanishing_caught = false;
  if (s.want_sector3) {
    const double e02 = ev[0] + mu0;
    try {
      const Eigen::MatrixXd h3 = sector3_hamiltonian(best, e02, units);
      const double e3 = symmetric_lowest(h3, 1).first[0];
      sector3_report = {{"e02_abs", e02}, {"e0_sector3_abs", e3}};
    } catch (const VanishingComponent&) {
      vanishing_caught = true;
    }
  }

  Outputs out;
  {
    std::vector<double> xs, ys, p0, vx, vy, vm, dd;
    for (int ix = 0; ix < n; ++ix) {
      for (int iy = 0; iy < n; ++iy) {
        const int i = grid.idx(ix, iy);
        xs.push_back(grid.x.points[static_cast<size_t>(ix)]);
        ys.push_back(grid.y.points[static_cast<size_t>(iy)]);
        p0.push_back(psi0[i]);
        vx.push_back(best.x[i]);
        vy.push_back(best.y[i]);
        vm.push_back(std::hypot(best.x[i], best.y[i]));
        dd.push_back(desc.values[i]);
      }
    }
    emit_csv(out, dir, "state.csv",
             {{"x (1)", xs},
              {"y (1)", ys},
              {"psi0_direct (1)", p0},
              {"tensor_vx (1)", vx},
              {"tensor_vy (1)", vy},
              {"tensor_mag (1)", vm},
              {"descended (1)", dd}});
  }

  json energies = json::array();
  for (Eigen::Index i = 0; i < ts.energies.size(); ++i) {
    energies.push_back(ts.energies[i]);
  }
  out.report = {
      {"experiment", "tensor2d"},
      {"potential", s.type},
      {"coefficient", s.coeff},
      {"n", n},
      {"e_direct", {ev[0], ev[1], ev[2]}},
      {"kernel_dimension", ts.kernel_dimension},
      {"kernel_max", ts.kernel_max},
      {"tensor_energies", energies},
      {"gap_direct", gap_direct},
      {"gap_diff", std::abs(mu0 - gap_direct)},
      {"descend_overlap", overlap},
      {"positivity_margin", best_margin},
      {"degenerate_count", ndeg},
      {"sector3", sector3_report},
      {"vanishing_component_caught", vanishing_caught},
  };
  out.tolerances = {{"kernel_cut", 1e-6},
                    {"degeneracy_gap", 1e-8},
                    {"support_floor_ratio", 1e-10},
                    {"eigensolver_residual", 1e-8}};
  return out;
}

// ----------------------------------------------------------------- propagate

struct PropagateSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  int n = 0;
  int n_defect = 0;
  double t_final = 0.0;
  std::vector<double> dts;
  std::string scheme_name;
  Scheme scheme = Scheme::split_operator;
  double center = 0.0;
  double width = 0.0;
};

PropagateSpec parse_propagate(const json& cfg) {
  PropagateSpec s;
  const json& gj = require(cfg, "grid");
  s.x_min = num(gj, "x_min");
  s.x_max = num(gj, "x_max");
  s.n = static_cast<int>(integer(gj, "n"));
  s.n_defect = static_cast<int>(int_or(cfg, "defect_grid_n", 80));
  s.t_final = num_or(cfg, "t_final", 1.0);
  const json& dts = require(cfg, "dt_values");
  check(dts.is_array() && !dts.empty(),
        "propagate: 'dt_values' must be a non-empty array");
  for (const json& dj : dts) {
    check(dj.is_number(), "propagate: dt_values entries must be numbers");
    const double dt = dj.get<double>();
    check(dt > 0.0, "propagate: dt values must be > 0");
    s.dts.push_back(dt);
  }
  s.scheme_name = str(cfg, "scheme");
  if (s.scheme_name == "split_operator") {
    s.scheme = Scheme::split_operator;
  } else if (s.scheme_name == "implicit_midpoint") {
    s.scheme = Scheme::implicit_midpoint;
  } else {
    throw ConfigError("propagate: unknown scheme '" + s.scheme_name + "'");
  }
  const json& pk = require(cfg, "packet");
  s.center = num(pk, "center");
  s.width = num(pk, "width");
  check(s.x_min < s.x_max, "propagate: grid needs x_min < x_max");
  check(s.n >= 16, "propagate: grid n must be >= 16");
  check(s.n_defect >= 16, "propagate: defect_grid_n must be >= 16");
  check(s.t_final > 0.0, "propagate: t_final must be > 0");
  check(s.width > 0.0, "propagate: packet width must be > 0");
  return s;
}

Outputs run_propagate(const PropagateSpec& s, const fs::path& dir) {
  const ModelUnits units = ModelUnits::dimensionless();
  const Grid1D grid = make_grid(s.x_min, s.x_max, s.n);
  Eigen::VectorXd wv(s.n), v1v(s.n), v2v(s.n);
  Eigen::VectorXcd p0(s.n);
  for (int i = 0; i < s.n; ++i) {
    const double x = grid.points[static_cast<size_t>(i)];
    wv[i] = x;
    v1v[i] = x * x - 1.0;
    v2v[i] = x * x + 1.0;
    p0[i] = std::exp(-0.5 * (x - s.center) * (x - s.center) /
                     (s.width * s.width));
  }
  const SuperPotential w = superpotential_from_samples(grid, wv, units);
  const RealField v1{grid, v1v};
  const RealField v2{grid, v2v};
  ComplexField psi0{grid, p0};
  normalize_riemann(psi0);

  std::vector<double> dt_col, res_col, ratio_col;
  double prev = 0.0;
  for (double dt : s.dts) {
    PropagationConfig c;
    c.scheme = s.scheme;
    c.dt = dt;
    const double r =
        intertwining_residual(psi0, w, v1, v2, s.t_final, c, units);
    dt_col.push_back(dt);
    res_col.push_back(r);
    ratio_col.push_back(prev > 0.0 ? prev / r
                                   : std::numeric_limits<double>::quiet_NaN());
    prev = r;
  }

  const double exact_floor =
      exact_intertwining_residual(psi0, w, v1, v2, s.t_final, units);

  // Dense matrix-exponential intertwining of the algebraic sector pair on a
  // coarse grid (pure factorization identity).
  const Grid1D gd = make_grid(s.x_min, s.x_max, s.n_defect);
  Eigen::VectorXd wd(s.n_defect);
  for (int i = 0; i < s.n_defect; ++i) {
    wd[i] = gd.points[static_cast<size_t>(i)];
  }
  const SuperPotential w_coarse = superpotential_from_samples(gd, wd, units);
  const double defect = charge_evolution_defect(w_coarse, s.t_final, units);

  Outputs out;
  emit_csv(out, dir, "residuals.csv",
           {{"dt (1)", dt_col},
            {"intertwining_residual (1)", res_col},
            {"halving_ratio (1)", ratio_col}});
  {
    PropagationConfig c;
    c.scheme = s.scheme;
    c.dt = s.dts.back();
    c.n_steps = std::llround(s.t_final / c.dt);
    const ComplexField pf = propagate(psi0, v1, c, units);
    std::vector<double> xs, re, im, a2;
    for (int i = 0; i < s.n; ++i) {
      xs.push_back(grid.points[static_cast<size_t>(i)]);
      re.push_back(pf.values[i].real());
      im.push_back(pf.values[i].imag());
      a2.push_back(std::norm(pf.values[i]));
    }
    emit_csv(out, dir, "packet_final.csv",
             {{"x (1)", xs},
              {"re_psi (1)", re},
              {"im_psi (1)", im},
              {"abs2_psi (1)", a2}});
  }

  json rows = json::array();
  for (size_t i = 0; i < dt_col.size(); ++i) {
    rows.push_back({{"dt", dt_col[i]},
                    {"residual", res_col[i]},
                    {"ratio", finite_or_null(ratio_col[i])}});
  }
  out.report = {
      {"experiment", "propagate"},
      {"scheme", s.scheme_name},
      {"t_final", s.t_final},
      {"residuals", rows},
      {"exact_propagator_floor", exact_floor},
      {"charge_defect_grid_n", s.n_defect},
      {"charge_evolution_defect", defect},
  };
  out.tolerances = {{"eigenstate_drift", 1e-6},
                    {"zero_partner_floor", 1e-6}};
  return out;
}

// ----------------------------------------------------------------- hierarchy

struct HierarchySpec {
  std::string model_name;
  Potential1D model;
  int n = 0;
  int n_sectors = 0;
  int n_ladder = 0;
};

HierarchySpec parse_hierarchy(const json& cfg) {
  HierarchySpec s;
  s.model_name = str(cfg, "model");
  s.model = named_model(s.model_name, "hierarchy");
  s.n = static_cast<int>(int_or(cfg, "grid_n", 301));
  s.n_sectors = static_cast<int>(int_or(cfg, "n_sectors", 3));
  s.n_ladder = static_cast<int>(int_or(cfg, "n_ladder", 5));
  check(s.n >= 16, "hierarchy: grid_n must be >= 16");
  check(s.n_sectors >= 1, "hierarchy: n_sectors must be >= 1");
  check(s.n_ladder >= 1, "hierarchy: n_ladder must be >= 1");
  return s;
}

Outputs run_hierarchy(const HierarchySpec& s, const fs::path& dir) {
  const ModelUnits units = ModelUnits::dimensionless();
  const Grid1D grid = make_grid(s.model.x_min, s.model.x_max, s.n);
  const RealField v1 = sample_field(grid, s.model.V);
  const Hierarchy hier = build_hierarchy(v1, units, s.n_sectors);

  Outputs out;
  {
    std::vector<double> idx, local, offs;
    for (int m = 0; m < s.n_sectors; ++m) {
      idx.push_back(hier.sectors[static_cast<size_t>(m)].index);
      local.push_back(hier.sectors[static_cast<size_t>(m)].ground_energy_local);
      offs.push_back(hier.cumulative_offsets[static_cast<size_t>(m)]);
    }
    emit_csv(out, dir, "sectors.csv",
             {{"sector (1)", idx},
              {"ground_energy_local (1)", local},
              {"cumulative_offset (1)", offs}});
  }
  {
    std::vector<double> xs;
    for (double x : grid.points) xs.push_back(x);
    std::vector<CsvColumn> cols{{"x (1)", xs}};
    for (int m = 0; m < s.n_sectors; ++m) {
      const auto& vals = hier.sectors[static_cast<size_t>(m)].potential.values;
      std::vector<double> col(vals.data(), vals.data() + vals.size());
      cols.push_back({"v_sector" + std::to_string(m + 1) + "_local (1)", col});
    }
    emit_csv(out, dir, "potentials.csv", cols);
  }

  double max_defect = 0.0;
  {
    const SpectrumResult s1 =
        eigensolve(hamiltonian_matrix(grid, hier.sectors[0].potential, units),
                   s.n_ladder + 1, grid);
    if (s.n_sectors >= 2) {
      const SpectrumResult s2 =
          eigensolve(hamiltonian_matrix(grid, hier.sectors[1].potential, units),
                     s.n_ladder, grid);
      std::vector<double> col_n, e1abs, e2abs, defect;
      for (int k = 0; k < s.n_ladder; ++k) {
        const double a = s1.energies[k + 1];
        const double b = s2.energies[k] + hier.cumulative_offsets[0];
        col_n.push_back(k);
        e1abs.push_back(a);
        e2abs.push_back(b);
        defect.push_back(std::abs(a - b));
        max_defect = std::max(max_defect, std::abs(a - b));
      }
      emit_csv(out, dir, "ladder.csv",
               {{"n (1)", col_n},
                {"e_np1_sector1 (1)", e1abs},
                {"e_n_sector2_abs (1)", e2abs},
                {"defect (1)", defect}});
    }
  }

  json offsets = json::array();
  for (double o : hier.cumulative_offsets) offsets.push_back(o);
  out.report = {
      {"experiment", "hierarchy"},
      {"model", s.model_name},
      {"n_sectors", s.n_sectors},
      {"grid_n", s.n},
      {"cumulative_offsets", offsets},
      {"max_ladder_defect", max_defect},
  };
  out.tolerances = {{"eigensolver_residual", 1e-8},
                    {"density_floor_ratio", 1e-14}};
  return out;
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"convergence", "double_well", "scatter",
          "tensor2d",    "propagate",   "hierarchy"};
}

void run_experiment(const std::string& name, const json& config,
                    const std::string& config_bytes, const fs::path& out_dir,
                    std::optional<long long> seed_override,
                    std::optional<int> threads) {
  const std::string declared = str(config, "experiment");
  if (declared != name) {
    throw ConfigError("config declares experiment '" + declared + "' but '" +
                      name + "' was requested");
  }

  // Parse and validate the full config before touching the filesystem, so a
  // malformed config never leaves a partial output directory behind.
  std::function<Outputs(const fs::path&)> runner;
  if (name == "convergence") {
    const ConvergenceSpec s = parse_convergence(config);
    runner = [s](const fs::path& d) { return run_convergence(s, d); };
  } else if (name == "double_well") {
    const DoubleWellParams s = parse_double_well(config, seed_override);
    runner = [s](const fs::path& d) { return run_double_well(s, d); };
  } else if (name == "scatter") {
    const ScatterSpec s = parse_scatter(config);
    runner = [s](const fs::path& d) { return run_scatter(s, d); };
  } else if (name == "tensor2d") {
    const Tensor2dSpec s = parse_tensor2d(config);
    runner = [s](const fs::path& d) { return run_tensor2d(s, d); };
  } else if (name == "propagate") {
    const PropagateSpec s = parse_propagate(config);
    runner = [s](const fs::path& d) { return run_propagate(s, d); };
  } else if (name == "hierarchy") {
    const HierarchySpec s = parse_hierarchy(config);
    runner = [s](const fs::path& d) { return run_hierarchy(s, d); };
  } else {
    throw ConfigError("unknown experiment: " + name);
  }

  fs::create_directories(out_dir);
  Outputs out = runner(out_dir);

  write_json(out_dir / "report.json", out.report);
  out.files.emplace_back("report.json",
                         sha256_hex(read_file_bytes(out_dir / "report.json")));

  json manifest;
  manifest["experiment"] = name;
  manifest["config_sha256"] = sha256_hex(config_bytes);
  if (seed_override.has_value()) {
    manifest["seed_override"] = *seed_override;
  } else {
    manifest["seed_override"] = nullptr;
  }
  manifest["threads"] = threads.has_value() ? json(*threads) : json(nullptr);
  manifest["versions"] = {
      {"susyqm", VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
  };
  manifest["tolerances"] = out.tolerances;
  json files = json::object();
  for (const auto& [fname, digest] : out.files) files[fname] = digest;
  manifest["outputs"] = files;
  write_json(out_dir / "manifest.json", manifest);
}

}  // namespace susyqm
