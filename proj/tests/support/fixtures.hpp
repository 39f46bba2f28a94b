#pragma once

#include <string>

#include "iacforge/policy/policy.hpp"

namespace testsupport {

// Two providers, two resources, one cross-provider dependency. Validates and
// plans clean; the plan has exactly one edge.
extern const char* kS3ContainerConfig;

// Same semantics as kS3ContainerConfig but with shuffled attribute order,
// comments and messy whitespace; canonical forms must match.
extern const char* kS3ContainerConfigMessy;

// depends_on cycle between two resources; validates but does not plan.
extern const char* kCycleConfig;

// References an undeclared resource; fails validate.
extern const char* kUnresolvedConfig;

// Builds a policy with `passing` rules that hold on kS3ContainerConfig's plan
// and `failing` rules that do not. Rule names are unique.
iacforge::policy::Policy mixed_policy(int passing, int failing);

}  // namespace testsupport
