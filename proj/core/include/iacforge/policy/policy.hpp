#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacforge/verify/verify.hpp"

namespace iacforge::policy {

enum class PredicateKind {
  ResourceExists,        // params: type
  ResourceCountAtLeast,  // params: type, count
  AttributeEquals,       // params: address, path, value
  AttributeMatches,      // params: address, path, pattern (ECMAScript regex)
  DependencyExists,      // params: from, to
  ProviderDeclared,      // params: name
};

std::string_view to_string(PredicateKind kind);

struct Rule {
  std::string name;  // unique within a policy
  PredicateKind predicate = PredicateKind::ResourceExists;
  nlohmann::json params;
};

// A correctness contract for one configuration. Either a set of builtin
// rules, or an external source evaluated by a policy engine.
struct Policy {
  std::string id;
  std::vector<Rule> rules;
  std::string rego_source;  // nonempty marks an engine-evaluated policy

  bool is_external() const { return !rego_source.empty(); }
  nlohmann::json to_json() const;
  // Stable rendering of the rule set (sorted by rule name, id excluded);
  // used to decide whether two policies demand the same thing.
  std::string canonical_text() const;
};

struct RuleOutcome {
  std::string name;
  bool passed = false;
};

struct RuleResults {
  std::vector<RuleOutcome> per_rule;  // evaluation order
  int passed_count = 0;
  int total_count = 0;

  bool all_passed() const { return passed_count == total_count; }
  std::string certificate() const;
  nlohmann::json to_json() const;
};

struct EmptyPolicy : std::runtime_error {
  EmptyPolicy() : std::runtime_error("policy has no rules") {}
};

struct PolicyFormatError : std::runtime_error {
  explicit PolicyFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Parses the builtin JSON schema:
//   {"id": "...", "rules": [{"name", "predicate", "params"}, ...]}
// Throws PolicyFormatError on schema violations (unknown predicate, missing
// or ill-typed params, duplicate rule names, invalid regex) and EmptyPolicy
// when the rule list is empty.
Policy parse_policy_json(const std::string& text);

Policy policy_from_rego(std::string id, std::string rego_source);

// Evaluates every builtin rule against the plan. Total: a missing subject or
// a `<computed>` value fails the rule, it never raises. Throws EmptyPolicy
// for a policy with no rules and PolicyFormatError for an external policy
// (those need the engine adapter).
RuleResults evaluate_policy(const Policy& policy, const verify::PlanDocument& plan);

// Number of rules of a builtin policy. External policies need the engine;
// see iacforge/policy/external.hpp.
int count_rules(const Policy& policy);

}  // namespace iacforge::policy
