#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "iacforge/hcl/ast.hpp"
#include "iacforge/verify/diagnostic.hpp"

namespace iacforge::verify {

// Sentinel for attribute values that cannot be resolved statically.
inline constexpr const char* kComputed = "<computed>";

// Provider names that resources may use without an explicit provider block.
const std::set<std::string>& implicit_provider_allowlist();

inline constexpr std::chrono::seconds kDefaultPlanTimeout{30};

// Static approximation of one applied configuration: resolved attribute
// values per resource address, the dependency edges between them, and the
// providers in play. Edges run from the dependent resource to its dependency.
struct PlanDocument {
  std::map<std::string, nlohmann::json> resources;
  std::vector<std::pair<std::string, std::string>> edges;
  std::set<std::string> providers;

  nlohmann::json to_json() const;
  // Compact JSON with sorted keys and sorted edges; byte-stable across runs.
  std::string to_canonical_json() const;
  static PlanDocument from_json(const nlohmann::json& j);
};

// Cycle search over an explicit dependency graph, as used by plan(). Returns
// the first cycle found as a node path whose first and last entries repeat,
// or nullopt when the graph is acyclic. Edges listed in adj under keys absent
// from nodes are still followed.
std::optional<std::vector<std::string>> find_cycle(
    const std::vector<std::string>& nodes,
    const std::map<std::string, std::vector<std::string>>& adj);

// Compilability gate: unique addresses, resolvable references, well-formed
// depends_on lists, required label counts.
VerdictReport validate(const hcl::Configuration& config);

// Deployability gate. Requires a validate pass (a failing input yields a
// NOT_VALIDATED report). Checks dependency acyclicity, variable defaults and
// provider coverage, then produces the PlanDocument. The document is present
// exactly when the report passed.
std::pair<VerdictReport, std::optional<PlanDocument>> plan(const hcl::Configuration& config);

// Text-level wrappers: a parse failure becomes a failed report with code
// PARSE instead of an exception.
VerdictReport validate_text(std::string_view text);
std::pair<VerdictReport, std::optional<PlanDocument>> plan_text(std::string_view text);

// Resolved attribute view (variable defaults inlined, literals folded,
// everything else `<computed>`), keyed by address. Needs no validate pass;
// used by static checks that must also run on non-deployable configs.
std::map<std::string, nlohmann::json> flatten_resources(const hcl::Configuration& config);

}  // namespace iacforge::verify
