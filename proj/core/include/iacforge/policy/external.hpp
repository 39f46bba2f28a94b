#pragma once

#include <stdexcept>
#include <string>

#include "iacforge/policy/policy.hpp"

namespace iacforge::policy {

struct OpaBackend {
  std::string opa_bin;  // path or bare name resolved against PATH
};

struct PolicyParseError : std::runtime_error {
  explicit PolicyParseError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluates an external policy with the engine: the plan document is the
// input, the package's top-level boolean results become the rules. Throws
// verify::BackendUnavailable when the binary is missing and PolicyParseError
// when the source does not compile or declares no package.
RuleResults external_policy_eval(const Policy& policy, const verify::PlanDocument& plan,
                                 const OpaBackend& backend);

// Rule count of an external policy: distinct top-level boolean results the
// package yields when queried against an empty input document.
int external_count_rules(const Policy& policy, const OpaBackend& backend);

}  // namespace iacforge::policy
