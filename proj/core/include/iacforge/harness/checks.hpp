#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacforge/hcl/ast.hpp"

namespace iacforge::harness {

struct Finding {
  std::string check_id;
  std::string subject;  // resource address or block label the finding is about
  std::string message;

  nlohmann::json to_json() const;
};

struct CheckContext {
  const hcl::Configuration& config;
  // Resolved attribute view keyed by address (managed resources and data
  // sources), from verify::flatten_resources.
  const std::map<std::string, nlohmann::json>& resources;
};

// What one check saw: how many elements it could attest and which failed.
struct CheckOutcome {
  std::size_t applicable = 0;
  std::vector<Finding> findings;
};

struct Check {
  std::string id;
  std::string description;
  std::function<CheckOutcome(const CheckContext&)> run;
};

struct CheckPack {
  std::string id;  // "lint" or "security"
  std::vector<Check> checks;
};

// Best-practice structural checks. An instance lints clean when a full pack
// run yields zero findings.
const CheckPack& lint_pack();

// Misconfiguration checks over resolved resource attributes. Evidence that
// cannot be resolved statically fails the check rather than passing it.
const CheckPack& security_pack();

struct PackResult {
  std::size_t applicable = 0;
  std::size_t passed = 0;  // applicable minus findings
  std::vector<Finding> findings;
};

PackResult run_pack(const CheckPack& pack, const hcl::Configuration& config);

}  // namespace iacforge::harness
