#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "iacforge/hcl/ast.hpp"

namespace iacforge::hcl {

// Deterministic rendering: comments dropped, two-space indentation, attributes
// sorted by name within each body, nested blocks kept in source order after
// the attributes, one blank line between top-level blocks, trailing newline.
// Opaque expressions are emitted byte-for-byte. Idempotent under re-parsing.
std::string canonicalize(const Configuration& config);

// Two configurations are considered structurally equal when their canonical
// forms are byte-identical.
bool structurally_equal(const Configuration& a, const Configuration& b);

struct EmptyModule : std::runtime_error {
  EmptyModule() : std::runtime_error("module has no files") {}
};

// Joins the .tf files of one module into a single source text: lexicographic
// filename order, separated by exactly one blank line. Throws EmptyModule on
// an empty list and std::invalid_argument for a non-.tf filename.
std::string concat_module(const std::vector<std::pair<std::string, std::string>>& files);

}  // namespace iacforge::hcl
