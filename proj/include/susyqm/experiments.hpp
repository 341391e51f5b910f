#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "susyqm/gmm.hpp"
#include "susyqm/optimizer.hpp"

namespace susyqm {

// Two-sector variational pipeline for the quartic double well, run in
// atomic units with the well parameters given in cm^-1:
//   V(x) = (a x^4 - b x^2 + e0) / hartree_cm1.
struct DoubleWellParams {
  double mass_au = 1837.152646;
  double a_cm1 = 438.9;
  double b_cm1 = 877.8;
  double e0_cm1 = -181.1;
  double x_min = -2.5;
  double x_max = 2.5;
  int n = 301;
  OptimizerConfig opt;          // seed used for sector 1; sector 2 gets seed+1
  double node_window = 1.5;     // |x| window for the sector-1 node probe
  double semiclassical_beta = 2.7107;
  double semiclassical_x0 = 1.0;
};

struct DoubleWellOutcome {
  // DVR reference on the configured grid (hartree)
  double e0_dvr = 0.0;
  double e1_dvr = 0.0;
  double delta_dvr = 0.0;
  // sector-1 fit
  double s1_energy = 0.0;
  bool s1_max_steps = false;
  // DVR ground energy of the mixture-derived partner potential
  double v2_dvr_e0 = 0.0;
  // sector-2 fit of the partner potential
  double s2_energy = 0.0;
  bool s2_max_steps = false;
  double rel_error = 0.0;       // |s2_energy - delta_dvr| / delta_dvr
  // node diagnostics of the implied sector-1 excited state
  double node_final = std::numeric_limits<double>::quiet_NaN();
  bool node_envelope_ok = false;
  // single-gaussian semiclassical splitting estimate (hartree)
  double semiclassical = 0.0;
  OptimizeResult sector1;
  OptimizeResult sector2;
};

DoubleWellOutcome run_double_well_pipeline(const DoubleWellParams& params);

// Names accepted as the CLI's positional experiment argument.
std::vector<std::string> experiment_names();

// Runs the named experiment: writes its CSV outputs, report.json and
// manifest.json into out_dir (created if missing). config_bytes is the raw
// config file content, hashed into the manifest. seed_override replaces the
// config seed when present; threads is recorded in the manifest.
// Throws ConfigError for malformed configs, module errors at runtime.
void run_experiment(const std::string& name, const nlohmann::json& config,
                    const std::string& config_bytes,
                    const std::filesystem::path& out_dir,
                    std::optional<long long> seed_override,
                    std::optional<int> threads);

}  // namespace susyqm
