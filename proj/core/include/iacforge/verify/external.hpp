#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

#include "iacforge/verify/verify.hpp"

namespace iacforge::verify {

struct BackendUnavailable : std::runtime_error {
  explicit BackendUnavailable(const std::string& what) : std::runtime_error(what) {}
};

struct ExternalBackend {
  std::string terraform_bin;  // path or bare name resolved against PATH
  std::chrono::seconds plan_timeout = kDefaultPlanTimeout;
};

// Each call materializes the config into a fresh private temp directory,
// invokes the real toolchain there and maps its machine-readable output
// onto Diagnostics. Throws BackendUnavailable when the binary is missing.
VerdictReport external_validate(const std::string& config_text, const ExternalBackend& backend);

// init (backendless, non-interactive) followed by plan under a wall-clock
// timeout. A timeout yields a failed report whose TIMEOUT diagnostic embeds
// the timeout notice used by repair prompts.
VerdictReport external_plan(const std::string& config_text, const ExternalBackend& backend);

}  // namespace iacforge::verify
