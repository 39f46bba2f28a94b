#include "iacforge/policy/policy.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace iacforge::policy {

std::string_view to_string(PredicateKind kind) {
  switch (kind) {
    case PredicateKind::ResourceExists: return "resource_exists";
    case PredicateKind::ResourceCountAtLeast: return "resource_count_at_least";
    case PredicateKind::AttributeEquals: return "attribute_equals";
    case PredicateKind::AttributeMatches: return "attribute_matches";
    case PredicateKind::DependencyExists: return "dependency_exists";
    case PredicateKind::ProviderDeclared: return "provider_declared";
  }
  return "resource_exists";
}

namespace {

PredicateKind predicate_from_string(const std::string& s) {
  if (s == "resource_exists") return PredicateKind::ResourceExists;
  if (s == "resource_count_at_least") return PredicateKind::ResourceCountAtLeast;
  if (s == "attribute_equals") return PredicateKind::AttributeEquals;
  if (s == "attribute_matches") return PredicateKind::AttributeMatches;
  if (s == "dependency_exists") return PredicateKind::DependencyExists;
  if (s == "provider_declared") return PredicateKind::ProviderDeclared;
  throw PolicyFormatError("unknown predicate '" + s + "'");
}

std::string require_string_param(const Rule& rule, const std::string& key) {
  if (!rule.params.contains(key) || !rule.params[key].is_string()) {
    throw PolicyFormatError("rule '" + rule.name + "': predicate " +
                            std::string(to_string(rule.predicate)) +
                            " needs string param '" + key + "'");
  }
  return rule.params[key].get<std::string>();
}

void validate_rule(const Rule& rule) {
  switch (rule.predicate) {
    case PredicateKind::ResourceExists:
      require_string_param(rule, "type");
      break;
    case PredicateKind::ResourceCountAtLeast: {
      require_string_param(rule, "type");
      if (!rule.params.contains("count") || !rule.params["count"].is_number_integer()) {
        throw PolicyFormatError("rule '" + rule.name + "': needs integer param 'count'");
      }
      break;
    }
    case PredicateKind::AttributeEquals:
      require_string_param(rule, "address");
      require_string_param(rule, "path");
      if (!rule.params.contains("value")) {
        throw PolicyFormatError("rule '" + rule.name + "': needs param 'value'");
      }
      break;
    case PredicateKind::AttributeMatches: {
      require_string_param(rule, "address");
      require_string_param(rule, "path");
      std::string pattern = require_string_param(rule, "pattern");
      try {
        std::regex probe(pattern, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw PolicyFormatError("rule '" + rule.name + "': invalid pattern: " + e.what());
      }
      break;
    }
    case PredicateKind::DependencyExists:
      require_string_param(rule, "from");
      require_string_param(rule, "to");
      break;
    case PredicateKind::ProviderDeclared:
      require_string_param(rule, "name");
      break;
  }
}

// Walks a dotted path through the resolved attribute object; numeric steps
// index arrays. Returns nullptr when any step is missing.
const nlohmann::json* walk_path(const nlohmann::json& root, const std::string& path) {
  const nlohmann::json* cur = &root;
  size_t start = 0;
  while (start <= path.size()) {
    size_t dot = path.find('.', start);
    std::string step = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (step.empty()) return nullptr;
    if (cur->is_object()) {
      auto it = cur->find(step);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    } else if (cur->is_array()) {
      if (step.find_first_not_of("0123456789") != std::string::npos) return nullptr;
      size_t idx = std::stoul(step);
      if (idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
    } else {
      return nullptr;
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return cur;
}

bool is_computed(const nlohmann::json& v) {
  return v.is_string() && v.get<std::string>() == verify::kComputed;
}

std::string address_type(const std::string& address) {
  std::string rest = address;
  if (rest.rfind("data.", 0) == 0) return "";  // managed resources only
  size_t dot = rest.find('.');
  return dot == std::string::npos ? rest : rest.substr(0, dot);
}

bool eval_rule(const Rule& rule, const verify::PlanDocument& plan) {
  switch (rule.predicate) {
    case PredicateKind::ResourceExists: {
      std::string type = rule.params["type"].get<std::string>();
      for (const auto& [addr, attrs] : plan.resources) {
        if (address_type(addr) == type) return true;
      }
      return false;
    }
    case PredicateKind::ResourceCountAtLeast: {
      std::string type = rule.params["type"].get<std::string>();
      long want = rule.params["count"].get<long>();
      long got = 0;
      for (const auto& [addr, attrs] : plan.resources) {
        if (address_type(addr) == type) ++got;
      }
      return got >= want;
    }
    case PredicateKind::AttributeEquals: {
      auto it = plan.resources.find(rule.params["address"].get<std::string>());
      if (it == plan.resources.end()) return false;
      const auto* v = walk_path(it->second, rule.params["path"].get<std::string>());
      if (!v || is_computed(*v)) return false;
      return *v == rule.params["value"];
    }
    case PredicateKind::AttributeMatches: {
      auto it = plan.resources.find(rule.params["address"].get<std::string>());
      if (it == plan.resources.end()) return false;
      const auto* v = walk_path(it->second, rule.params["path"].get<std::string>());
      if (!v || is_computed(*v) || !v->is_string()) return false;
      std::regex pattern(rule.params["pattern"].get<std::string>(), std::regex::ECMAScript);
      return std::regex_search(v->get<std::string>(), pattern);
    }
    case PredicateKind::DependencyExists: {
      std::pair<std::string, std::string> want{rule.params["from"].get<std::string>(),
                                               rule.params["to"].get<std::string>()};
      return std::find(plan.edges.begin(), plan.edges.end(), want) != plan.edges.end();
    }
    case PredicateKind::ProviderDeclared:
      return plan.providers.count(rule.params["name"].get<std::string>()) > 0;
  }
  return false;
}

}  // namespace

nlohmann::json Policy::to_json() const {
  nlohmann::json rule_arr = nlohmann::json::array();
  for (const auto& r : rules) {
    rule_arr.push_back({{"name", r.name},
                        {"predicate", std::string(to_string(r.predicate))},
                        {"params", r.params}});
  }
  nlohmann::json j{{"id", id}, {"rules", std::move(rule_arr)}};
  if (is_external()) j["rego"] = rego_source;
  return j;
}

std::string Policy::canonical_text() const {
  if (is_external()) return rego_source;
  auto sorted = rules;
  std::sort(sorted.begin(), sorted.end(),
            [](const Rule& a, const Rule& b) { return a.name < b.name; });
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : sorted) {
    arr.push_back({{"name", r.name},
                   {"predicate", std::string(to_string(r.predicate))},
                   {"params", r.params}});
  }
  return arr.dump();
}

std::string RuleResults::certificate() const {
  std::string out = "policy rules: " + std::to_string(passed_count) + "/" +
                    std::to_string(total_count) + " passed\n";
  for (const auto& r : per_rule) {
    out += r.passed ? "pass: " : "FAIL: ";
    out += r.name;
    out += "\n";
  }
  return out;
}

nlohmann::json RuleResults::to_json() const {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : per_rule) rules.push_back({{"name", r.name}, {"passed", r.passed}});
  return nlohmann::json{{"per_rule", std::move(rules)},
                        {"passed", passed_count},
                        {"total", total_count},
                        {"all_passed", all_passed()}};
}

Policy parse_policy_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PolicyFormatError(std::string("policy is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("rules") || !j["rules"].is_array()) {
    throw PolicyFormatError("policy must be an object with a 'rules' array");
  }

  Policy policy;
  policy.id = j.value("id", "");
  if (j["rules"].empty()) throw EmptyPolicy();

  std::set<std::string> names;
  for (const auto& rj : j["rules"]) {
    if (!rj.is_object() || !rj.contains("name") || !rj["name"].is_string() ||
        !rj.contains("predicate") || !rj["predicate"].is_string()) {
      throw PolicyFormatError("each rule needs a string 'name' and 'predicate'");
    }
    Rule rule;
    rule.name = rj["name"].get<std::string>();
    rule.predicate = predicate_from_string(rj["predicate"].get<std::string>());
    rule.params = rj.value("params", nlohmann::json::object());
    if (!names.insert(rule.name).second) {
      throw PolicyFormatError("duplicate rule name '" + rule.name + "'");
    }
    validate_rule(rule);
    policy.rules.push_back(std::move(rule));
  }
  return policy;
}

Policy policy_from_rego(std::string id, std::string rego_source) {
  Policy p;
  p.id = std::move(id);
  p.rego_source = std::move(rego_source);
  return p;
}

RuleResults evaluate_policy(const Policy& policy, const verify::PlanDocument& plan) {
  if (policy.is_external()) {
    throw PolicyFormatError("external policy needs the engine adapter");
  }
  if (policy.rules.empty()) throw EmptyPolicy();

  RuleResults results;
  results.total_count = static_cast<int>(policy.rules.size());
  for (const auto& rule : policy.rules) {
    bool ok = eval_rule(rule, plan);
    results.per_rule.push_back({rule.name, ok});
    if (ok) ++results.passed_count;
  }
  return results;
}

int count_rules(const Policy& policy) {
  if (policy.is_external()) {
    throw PolicyFormatError("external policy needs the engine adapter to count rules");
  }
  if (policy.rules.empty()) throw EmptyPolicy();
  return static_cast<int>(policy.rules.size());
}

}  // namespace iacforge::policy
