#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "susyqm/errors.hpp"
#include "susyqm/experiments.hpp"
#include "susyqm/io.hpp"
#include "susyqm/version.hpp"

// Optional BLAS threading hook; resolves to null when the linked BLAS does
// not export it, in which case the setting is recorded but has no effect.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::optional<int> read_thread_env() {
  const char* raw = std::getenv("SUSYQM_THREADS");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::string text(raw);
  size_t consumed = 0;
  int value = 0;
  try {
    value = std::stoi(text, &consumed);
  } catch (const std::exception&) {
    throw susyqm::ConfigError("SUSYQM_THREADS must be a positive integer, got '" +
                              text + "'");
  }
  if (consumed != text.size() || value < 1) {
    throw susyqm::ConfigError("SUSYQM_THREADS must be a positive integer, got '" +
                              text + "'");
  }
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  std::string experiment;
  std::string config_path;
  std::string out_dir = "out";
  std::optional<long long> seed;

  CLI::App app{"susyqm: supersymmetric partner-potential experiments"};
  std::string names;
  for (const std::string& n : susyqm::experiment_names()) {
    names += (names.empty() ? "" : ", ") + n;
  }
  app.add_option("experiment", experiment, "experiment to run (" + names + ")")
      ->required();
  app.add_option("--config", config_path, "path of the JSON config file")
      ->required();
  app.add_option("--out", out_dir, "output directory (created if missing)")
      ->capture_default_str();
  app.add_option("--seed", seed, "override the config's random seed");
  app.set_version_flag("--version", susyqm::VERSION);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const std::optional<int> threads = read_thread_env();
    if (threads.has_value() && openblas_set_num_threads != nullptr) {
      openblas_set_num_threads(*threads);
    }

    const std::vector<std::string> known = susyqm::experiment_names();
    if (std::find(known.begin(), known.end(), experiment) == known.end()) {
      throw susyqm::ConfigError("unknown experiment: " + experiment);
    }

    std::string config_bytes;
    try {
      config_bytes = susyqm::read_file_bytes(config_path);
    } catch (const std::exception& e) {
      throw susyqm::ConfigError("cannot read config file '" + config_path +
                                "': " + e.what());
    }
    nlohmann::json config;
    try {
      config = nlohmann::json::parse(config_bytes);
    } catch (const nlohmann::json::parse_error& e) {
      throw susyqm::ConfigError("config is not valid JSON: " +
                                std::string(e.what()));
    }

    susyqm::run_experiment(experiment, config, config_bytes, out_dir, seed,
                           threads);
    std::cout << "wrote " << (std::filesystem::path(out_dir) / "report.json").string()
              << "\n";
    return kExitOk;
  } catch (const susyqm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const susyqm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
