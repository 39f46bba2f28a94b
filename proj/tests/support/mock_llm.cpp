#include "mock_llm.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "iacforge/hcl/canonical.hpp"
#include "iacforge/hcl/parser.hpp"
#include "iacforge/repair/templates.hpp"
#include "iacforge/verify/verify.hpp"

namespace testsupport {

namespace {

using iacforge::hcl::Attribute;
using iacforge::hcl::Block;
using iacforge::hcl::BlockKind;
using iacforge::hcl::Configuration;
using iacforge::hcl::Expression;

std::string strip_fence(std::string text) {
  if (text.rfind("```", 0) == 0) {
    auto nl = text.find('\n');
    text = nl == std::string::npos ? "" : text.substr(nl + 1);
  }
  auto tail = text.find_last_of('\n');
  if (tail != std::string::npos && text.substr(tail + 1) == "```") {
    text = text.substr(0, tail + 1);
  } else if (text.size() >= 4 && text.substr(text.size() - 4) == "```\n") {
    text = text.substr(0, text.size() - 4);
  }
  return text;
}

std::string block_content(const std::string& prompt, const std::string& tag) {
  auto open = "<" + tag + ">";
  auto close = "</" + tag + ">";
  auto start = prompt.find(open);
  if (start == std::string::npos) throw std::runtime_error("mock: no <" + tag + "> in prompt");
  start += open.size();
  if (start < prompt.size() && prompt[start] == '\n') ++start;
  auto end = prompt.find(close, start);
  if (end == std::string::npos) throw std::runtime_error("mock: unclosed <" + tag + ">");
  return strip_fence(prompt.substr(start, end - start));
}

std::vector<std::string> resource_addresses(const Configuration& config) {
  std::vector<std::string> out;
  for (const auto& b : config.blocks) {
    auto addr = b.address();
    if (!addr.empty()) out.push_back(addr);
  }
  return out;
}

Expression string_expr(const std::string& value) {
  Expression e;
  e.kind = Expression::Kind::String;
  e.string_value = value;
  e.raw = "\"" + value + "\"";
  return e;
}

// Mechanical fixes keyed off the certificate, mirroring what a competent
// model would do with the same feedback.
std::string repair_config(const std::string& broken, const std::string& certificate) {
  // parse failures in fixtures are a poisoned line; drop it
  if (certificate.find("PARSE") != std::string::npos ||
      broken.find("!!!BROKEN!!!") != std::string::npos) {
    std::istringstream in(broken);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
      if (line.find("!!!BROKEN!!!") == std::string::npos) out << line << "\n";
    }
    return out.str();
  }

  auto config = iacforge::hcl::parse_config(broken);

  if (certificate.find("UNRESOLVED_REF") != std::string::npos) {
    std::set<std::string> names;
    static const std::regex var_ref(R"(undeclared object 'var\.([A-Za-z0-9_-]+))");
    for (auto it = std::sregex_iterator(certificate.begin(), certificate.end(), var_ref);
         it != std::sregex_iterator(); ++it) {
      names.insert((*it)[1].str());
    }
    for (const auto& name : names) {
      Block var;
      var.kind = BlockKind::Variable;
      var.keyword = "variable";
      var.labels = {name};
      var.body.attributes.push_back(Attribute{"default", string_expr("filled-in"), 0});
      config.blocks.push_back(std::move(var));
    }
    if (!names.empty()) return iacforge::hcl::canonicalize(config);
  }

  if (certificate.find("MISSING_DEFAULT") != std::string::npos) {
    static const std::regex var_name(R"(variable '([^']+)')");
    std::set<std::string> names;
    for (auto it = std::sregex_iterator(certificate.begin(), certificate.end(), var_name);
         it != std::sregex_iterator(); ++it) {
      names.insert((*it)[1].str());
    }
    for (auto& b : config.blocks) {
      if (b.kind != BlockKind::Variable || b.labels.empty()) continue;
      if (!names.count(b.labels[0])) continue;
      b.body.attributes.push_back(Attribute{"default", string_expr("filled-in"), 0});
    }
    return iacforge::hcl::canonicalize(config);
  }

  if (certificate.find("CYCLE") != std::string::npos) {
    for (auto& b : config.blocks) {
      auto& attrs = b.body.attributes;
      attrs.erase(std::remove_if(attrs.begin(), attrs.end(),
                                 [](const Attribute& a) { return a.name == "depends_on"; }),
                  attrs.end());
    }
    return iacforge::hcl::canonicalize(config);
  }

  if (certificate.find("DUP_ADDRESS") != std::string::npos) {
    std::set<std::string> seen;
    for (auto& b : config.blocks) {
      auto addr = b.address();
      if (addr.empty()) continue;
      if (!seen.insert(addr).second && b.labels.size() == 2) {
        b.labels[1] += "_2";
      }
    }
    return iacforge::hcl::canonicalize(config);
  }

  return broken;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string tagged(const std::string& tag, const std::string& body) {
  return "<" + tag + ">\n" + body + (body.empty() || body.back() == '\n' ? "" : "\n") + "</" +
         tag + ">";
}

std::string judge_reply(const std::string& prompt_nl, const std::string& config_text) {
  Configuration config;
  try {
    config = iacforge::hcl::parse_config(config_text);
  } catch (const iacforge::hcl::ParseError&) {
    return "VERDICT: NO\nthe configuration under review does not parse.";
  }
  std::vector<std::string> missing;
  for (const auto& addr : resource_addresses(config)) {
    if (prompt_nl.find(addr) == std::string::npos) missing.push_back(addr);
  }
  if (missing.empty()) return "VERDICT: YES";
  return "VERDICT: NO\nname these resources explicitly: " + join(missing, ", ");
}

std::string mutated_config_for(const std::string& config_text) {
  auto config = iacforge::hcl::parse_config(config_text);
  Block extra;
  extra.kind = BlockKind::Resource;
  extra.keyword = "resource";
  extra.labels = {"null_resource", "mutation"};
  Expression triggers;
  triggers.kind = Expression::Kind::Map;
  triggers.entries.emplace_back("reason", string_expr("requested-change"));
  extra.body.attributes.push_back(Attribute{"triggers", triggers, 0});
  config.blocks.push_back(std::move(extra));
  return iacforge::hcl::canonicalize(config);
}

std::string clone_config_for(const std::string& config_text) {
  auto config = iacforge::hcl::parse_config(config_text);
  Block out;
  out.kind = BlockKind::Output;
  out.keyword = "output";
  out.labels = {"clone_marker"};
  out.body.attributes.push_back(Attribute{"value", string_expr("alternate-build"), 0});
  config.blocks.push_back(std::move(out));
  return iacforge::hcl::canonicalize(config);
}

}  // namespace

std::string aligned_prompt_for(const std::string& config_text) {
  auto config = iacforge::hcl::parse_config(config_text);
  auto addresses = resource_addresses(config);
  if (addresses.empty()) return "Generate an empty Terraform configuration.";
  return "Generate a Terraform configuration that provisions " + join(addresses, ", ") + ".";
}

std::string passing_policy_json_for(const std::string& config_text) {
  auto [report, doc] = iacforge::verify::plan_text(config_text);
  if (!doc) throw std::runtime_error("mock: policy requested for a non-deployable config");

  std::map<std::string, int> type_counts;
  for (const auto& [addr, res] : doc->resources) {
    if (addr.rfind("data.", 0) == 0) continue;
    type_counts[addr.substr(0, addr.find('.'))]++;
  }

  nlohmann::json rules = nlohmann::json::array();
  for (const auto& [type, count] : type_counts) {
    rules.push_back({{"name", "has_" + type},
                     {"predicate", "resource_exists"},
                     {"params", {{"type", type}}}});
    rules.push_back({{"name", "count_" + type},
                     {"predicate", "resource_count_at_least"},
                     {"params", {{"type", type}, {"count", count}}}});
  }
  if (!doc->providers.empty()) {
    auto name = *doc->providers.begin();
    rules.push_back({{"name", "provider_" + name},
                     {"predicate", "provider_declared"},
                     {"params", {{"name", name}}}});
  }
  if (rules.empty()) {
    rules.push_back({{"name", "no_resources"},
                     {"predicate", "resource_count_at_least"},
                     {"params", {{"type", "aws_s3_bucket"}, {"count", 0}}}});
  }
  return nlohmann::json{{"rules", std::move(rules)}}.dump(2);
}

RuleBasedMockClient::RuleBasedMockClient(MockBehavior behavior) : behavior_(behavior) {}

int RuleBasedMockClient::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return calls_;
}

std::string RuleBasedMockClient::complete(const std::string& prompt,
                                          const iacforge::repair::GenerationParams&) {
  std::lock_guard<std::mutex> lock(mu_);
  ++calls_;

  if (behavior_.untagged_replies > 0) {
    --behavior_.untagged_replies;
    return "I need more context before I can answer that.";
  }

  // mutation-gen: invent a change, apply it, refresh the policy
  if (prompt.find("<mutation_prompt>") != std::string::npos) {
    auto initial = block_content(prompt, "initial_terraform_config");
    if (behavior_.stale_policies > 0) {
      --behavior_.stale_policies;
      auto mutated = mutated_config_for(initial);
      return tagged("mutation_prompt", "Add null_resource.mutation to the setup.") + "\n" +
             tagged("mutated_terraform_config", mutated) + "\n" +
             tagged("mutated_policy", passing_policy_json_for(initial));
    }
    auto mutated = mutated_config_for(initial);
    auto addresses = resource_addresses(iacforge::hcl::parse_config(mutated));
    auto change_request =
        "Add null_resource.mutation so the deployment provisions " + join(addresses, ", ") + ".";
    return tagged("mutation_prompt", change_request) + "\n" +
           tagged("mutated_terraform_config", mutated) + "\n" +
           tagged("mutated_policy", passing_policy_json_for(mutated));
  }

  // clone-gen: a structurally different config satisfying the same policy
  if (prompt.find("<cloned_terraform_config>") != std::string::npos) {
    auto existing = block_content(prompt, "existing_terraform_config");
    if (behavior_.identical_clones > 0) {
      --behavior_.identical_clones;
      return tagged("cloned_terraform_config", existing);
    }
    return tagged("cloned_terraform_config", clone_config_for(existing));
  }

  // prompt-gen: directive sentence listing the real addresses
  if (prompt.find("<generated_prompt>") != std::string::npos) {
    auto config = block_content(prompt, "terraform_config");
    return tagged("generated_prompt", aligned_prompt_for(config));
  }

  // policy-gen and repair-fv3: a rule set the actual plan passes
  if (prompt.find("<generated_policy>") != std::string::npos) {
    auto config = block_content(prompt, "terraform_config");
    return tagged("generated_policy", passing_policy_json_for(config));
  }
  if (prompt.find("<corrected_policy>") != std::string::npos) {
    auto config = block_content(prompt, "terraform_config");
    return tagged("corrected_policy", passing_policy_json_for(config));
  }

  // judge-align: verdict protocol
  if (prompt.find("VERDICT:") != std::string::npos) {
    if (behavior_.judge_rejections > 0) {
      --behavior_.judge_rejections;
      return "VERDICT: NO\nname every resource address explicitly.";
    }
    return judge_reply(block_content(prompt, "user_prompt"),
                       block_content(prompt, "terraform_config"));
  }

  // repair-fv1 / repair-fv2: fix what the certificate describes
  if (prompt.find("<corrected_terraform_config>") != std::string::npos) {
    auto broken = block_content(prompt, "incorrect_terraform_config");
    if (behavior_.botched_repairs > 0) {
      --behavior_.botched_repairs;
      return tagged("corrected_terraform_config", broken);
    }
    auto certificate = block_content(prompt, "error_message");
    return tagged("corrected_terraform_config", repair_config(broken, certificate));
  }

  // few-shot generation prompts: any valid config will do
  if (prompt.find("<final_terraform_config>") != std::string::npos) {
    return tagged("final_terraform_config",
                  iacforge::repair::builtin_default_examples().front());
  }
  if (prompt.find("<mutated_terraform_config>") != std::string::npos) {
    auto initial = block_content(prompt, "initial_terraform_config");
    return tagged("mutated_terraform_config", mutated_config_for(initial));
  }

  throw std::runtime_error("mock: unrecognized prompt shape");
}

}  // namespace testsupport
