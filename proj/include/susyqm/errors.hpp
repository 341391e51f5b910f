#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace susyqm {

// Base class for all toolkit errors. Every error carries a module name and a
// stable code string so callers (and the CLI) can report module-qualified
// failures like "scattering/ClosedChannel".
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string code, const std::string& what)
      : std::runtime_error(module + "/" + code + ": " + what),
        module_(std::move(module)),
        code_(std::move(code)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& code() const noexcept { return code_; }

 private:
  std::string module_;
  std::string code_;
};

#define SUSYQM_DEFINE_ERROR(Name, Module)                 \
  class Name : public Error {                             \
   public:                                                \
    explicit Name(const std::string& what)                \
        : Error(Module, #Name, what) {}                   \
  }

// grid-engine
SUSYQM_DEFINE_ERROR(DomainError, "grid-engine");
SUSYQM_DEFINE_ERROR(GridMismatch, "grid-engine");
SUSYQM_DEFINE_ERROR(ConvergenceError, "grid-engine");

// susy-core
SUSYQM_DEFINE_ERROR(DegenerateDensity, "susy-core");
SUSYQM_DEFINE_ERROR(InsufficientBoundStates, "susy-core");
SUSYQM_DEFINE_ERROR(ZeroEnergy, "susy-core");

// gmm-optimizer (CollapsedComponent and MaxStepsExceeded carry payloads and
// are defined in gmm.hpp / optimizer.hpp)
SUSYQM_DEFINE_ERROR(EmptyEnsemble, "gmm-optimizer");
SUSYQM_DEFINE_ERROR(LineSearchFailure, "gmm-optimizer");

class NodeCountError : public Error {
 public:
  NodeCountError(int count, const std::string& what)
      : Error("gmm-optimizer", "NodeCountError", what), count_(count) {}
  int count() const noexcept { return count_; }

 private:
  int count_;
};

// scattering
SUSYQM_DEFINE_ERROR(ClosedChannel, "scattering");
SUSYQM_DEFINE_ERROR(NonAsymptoticPotential, "scattering");
SUSYQM_DEFINE_ERROR(NonAsymptoticSuperpotential, "scattering");

// propagation
SUSYQM_DEFINE_ERROR(ZeroPartnerState, "propagation");
SUSYQM_DEFINE_ERROR(StepTooLarge, "propagation");

// multidim-susy
SUSYQM_DEFINE_ERROR(VanishingComponent, "multidim-susy");
SUSYQM_DEFINE_ERROR(ZeroTrial, "multidim-susy");

// cli
SUSYQM_DEFINE_ERROR(UnsupportedUnit, "cli");
SUSYQM_DEFINE_ERROR(ConfigError, "cli");

#undef SUSYQM_DEFINE_ERROR

}  // namespace susyqm
