#include "iacforge/harness/checks.hpp"

#include <cctype>
#include <regex>
#include <set>

#include "iacforge/verify/verify.hpp"

namespace iacforge::harness {

namespace {

using hcl::Block;
using hcl::BlockKind;
using hcl::Expression;

template <typename Fn>
void walk_expressions(const hcl::Body& body, Fn&& fn) {
  for (const auto& a : body.attributes) fn(a.value);
  for (const auto& b : body.blocks) walk_expressions(b.body, fn);
}

void collect_expr_var_refs(const Expression& e, std::set<std::string>& structural,
                           std::set<std::string>& textual) {
  switch (e.kind) {
    case Expression::Kind::Reference:
    case Expression::Kind::Interpolation:
      for (const auto& tr : e.traversals) {
        if (tr.size() >= 2 && tr[0] == "var") structural.insert(tr[1]);
      }
      break;
    case Expression::Kind::List:
      for (const auto& el : e.elements) collect_expr_var_refs(el, structural, textual);
      break;
    case Expression::Kind::Map:
      for (const auto& [k, v] : e.entries) collect_expr_var_refs(v, structural, textual);
      break;
    case Expression::Kind::Opaque: {
      // Unmodeled source (function calls, heredocs). Counted as usage only;
      // too fuzzy to report an undeclared reference from.
      static const std::regex var_ref(R"(\bvar\.([A-Za-z_][A-Za-z0-9_-]*))");
      for (auto it = std::sregex_iterator(e.raw.begin(), e.raw.end(), var_ref);
           it != std::sregex_iterator(); ++it) {
        textual.insert((*it)[1].str());
      }
      break;
    }
    default:
      break;
  }
}

struct VarRefs {
  std::set<std::string> structural;
  std::set<std::string> textual;  // superset source: opaque expression scans
};

VarRefs collect_var_refs(const hcl::Configuration& config) {
  VarRefs refs;
  for (const auto& b : config.blocks) {
    if (b.kind == BlockKind::Variable) continue;  // a default never uses itself
    walk_expressions(b.body, [&](const Expression& e) {
      collect_expr_var_refs(e, refs.structural, refs.textual);
    });
  }
  return refs;
}

std::string type_prefix(const std::string& type) {
  auto pos = type.find('_');
  return pos == std::string::npos ? type : type.substr(0, pos);
}

// Provider prefixes actually exercised: resource and data source types plus
// explicit provider attributes.
std::set<std::string> used_provider_prefixes(const hcl::Configuration& config) {
  std::set<std::string> used;
  for (const auto& b : config.blocks) {
    if (b.kind != BlockKind::Resource && b.kind != BlockKind::Data) continue;
    if (!b.labels.empty()) used.insert(type_prefix(b.labels[0]));
    for (const auto& a : b.body.attributes) {
      if (a.name != "provider") continue;
      if (a.value.kind == Expression::Kind::Reference && !a.value.reference().empty()) {
        used.insert(a.value.reference()[0]);
      } else if (a.value.kind == Expression::Kind::String) {
        auto v = a.value.string_value;
        used.insert(v.substr(0, v.find('.')));
      }
    }
  }
  return used;
}

Check make_unused_variable_check() {
  return {"unused-variable", "every declared variable is referenced somewhere",
          [](const CheckContext& ctx) {
            auto refs = collect_var_refs(ctx.config);
            CheckOutcome out;
            for (const auto& b : ctx.config.blocks) {
              if (b.kind != BlockKind::Variable || b.labels.empty()) continue;
              ++out.applicable;
              const auto& name = b.labels[0];
              if (!refs.structural.count(name) && !refs.textual.count(name)) {
                out.findings.push_back({"unused-variable", "variable." + name,
                                        "variable \"" + name + "\" is never referenced"});
              }
            }
            return out;
          }};
}

Check make_undeclared_variable_check() {
  return {"undeclared-variable-reference",
          "every var reference names a declared variable",
          [](const CheckContext& ctx) {
            std::set<std::string> declared;
            for (const auto& b : ctx.config.blocks) {
              if (b.kind == BlockKind::Variable && !b.labels.empty())
                declared.insert(b.labels[0]);
            }
            auto refs = collect_var_refs(ctx.config);
            CheckOutcome out;
            out.applicable = refs.structural.size();
            for (const auto& name : refs.structural) {
              if (!declared.count(name)) {
                out.findings.push_back({"undeclared-variable-reference", "var." + name,
                                        "var." + name + " has no variable block"});
              }
            }
            return out;
          }};
}

Check make_unused_provider_check() {
  return {"unused-provider", "every provider block backs at least one resource",
          [](const CheckContext& ctx) {
            auto used = used_provider_prefixes(ctx.config);
            CheckOutcome out;
            for (const auto& b : ctx.config.blocks) {
              if (b.kind != BlockKind::Provider || b.labels.empty()) continue;
              ++out.applicable;
              const auto& name = b.labels[0];
              if (!used.count(name)) {
                out.findings.push_back({"unused-provider", "provider." + name,
                                        "provider \"" + name + "\" backs no resource"});
              }
            }
            return out;
          }};
}

Check make_missing_provider_check() {
  return {"missing-provider-block",
          "every provider a resource type implies is declared explicitly",
          [](const CheckContext& ctx) {
            std::set<std::string> declared;
            for (const auto& b : ctx.config.blocks) {
              if (b.kind == BlockKind::Provider && !b.labels.empty())
                declared.insert(b.labels[0]);
            }
            CheckOutcome out;
            for (const auto& prefix : used_provider_prefixes(ctx.config)) {
              ++out.applicable;
              if (!declared.count(prefix)) {
                out.findings.push_back({"missing-provider-block", prefix,
                                        "resources use provider \"" + prefix +
                                            "\" but no provider block declares it"});
              }
            }
            return out;
          }};
}

Check make_empty_resource_check() {
  return {"empty-resource-body", "resource bodies carry at least one attribute or block",
          [](const CheckContext& ctx) {
            CheckOutcome out;
            for (const auto& b : ctx.config.blocks) {
              if (b.kind != BlockKind::Resource) continue;
              ++out.applicable;
              if (b.body.attributes.empty() && b.body.blocks.empty()) {
                out.findings.push_back({"empty-resource-body", b.address(),
                                        "resource body is empty"});
              }
            }
            return out;
          }};
}

Check make_duplicate_output_check() {
  return {"duplicate-output-name", "output names are unique",
          [](const CheckContext& ctx) {
            std::map<std::string, int> counts;
            CheckOutcome out;
            for (const auto& b : ctx.config.blocks) {
              if (b.kind != BlockKind::Output || b.labels.empty()) continue;
              ++out.applicable;
              ++counts[b.labels[0]];
            }
            for (const auto& [name, n] : counts) {
              if (n > 1) {
                out.findings.push_back({"duplicate-output-name", "output." + name,
                                        "output \"" + name + "\" is declared " +
                                            std::to_string(n) + " times"});
              }
            }
            return out;
          }};
}

// --- security helpers -------------------------------------------------------

bool is_managed_type(const std::string& addr, const std::string& type) {
  return addr.rfind(type + ".", 0) == 0;
}

const nlohmann::json* attr_at(const nlohmann::json& res,
                              std::initializer_list<const char*> path) {
  const nlohmann::json* cur = &res;
  for (const char* seg : path) {
    if (!cur->is_object() || !cur->contains(seg)) return nullptr;
    cur = &(*cur)[seg];
  }
  return cur;
}

bool is_computed(const nlohmann::json* v) {
  return v && v->is_string() && v->get<std::string>() == verify::kComputed;
}

bool is_true(const nlohmann::json* v) {
  if (!v) return false;
  if (v->is_boolean()) return v->get<bool>();
  if (v->is_string()) return v->get<std::string>() == "true";
  return false;
}

bool equals_string(const nlohmann::json* v, const char* s) {
  return v && v->is_string() && v->get<std::string>() == s;
}

// Nested blocks flatten to one object or an array of objects; visit each.
template <typename Fn>
void for_each_entry(const nlohmann::json* node, Fn&& fn) {
  if (!node) return;
  if (node->is_array()) {
    for (const auto& el : *node) fn(el);
  } else if (node->is_object()) {
    fn(*node);
  }
}

}  // namespace

nlohmann::json Finding::to_json() const {
  return nlohmann::json{{"check", check_id}, {"subject", subject}, {"message", message}};
}

const CheckPack& lint_pack() {
  static const CheckPack pack{
      "lint",
      {
          make_unused_variable_check(),
          make_undeclared_variable_check(),
          make_unused_provider_check(),
          make_missing_provider_check(),
          make_empty_resource_check(),
          make_duplicate_output_check(),
      },
  };
  return pack;
}

namespace {

Check make_typed_check(std::string id, std::string description,
                       std::vector<std::string> types,
                       std::function<std::string(const nlohmann::json&)> verdict) {
  auto run = [check_id = id, types = std::move(types),
              verdict = std::move(verdict)](const CheckContext& ctx) {
    CheckOutcome out;
    for (const auto& [addr, res] : ctx.resources) {
      bool matches = false;
      for (const auto& t : types) {
        if (is_managed_type(addr, t)) {
          matches = true;
          break;
        }
      }
      if (!matches) continue;
      ++out.applicable;
      auto msg = verdict(res);
      if (!msg.empty()) out.findings.push_back({check_id, addr, msg});
    }
    return out;
  };
  return {std::move(id), std::move(description), std::move(run)};
}

}  // namespace

const CheckPack& security_pack() {
  static const CheckPack pack{
      "security",
      {
          make_typed_check(
              "s3-versioning-enabled", "S3 buckets keep object versions",
              {"aws_s3_bucket"},
              [](const nlohmann::json& res) -> std::string {
                if (is_true(attr_at(res, {"versioning", "enabled"}))) return {};
                if (equals_string(attr_at(res, {"versioning_configuration", "status"}),
                                  "Enabled"))
                  return {};
                return "bucket versioning is not enabled";
              }),
          make_typed_check(
              "s3-no-public-acl", "S3 buckets do not grant public ACLs",
              {"aws_s3_bucket"},
              [](const nlohmann::json& res) -> std::string {
                auto* acl = attr_at(res, {"acl"});
                if (!acl) return {};
                if (is_computed(acl)) return "acl cannot be resolved statically";
                if (equals_string(acl, "public-read") ||
                    equals_string(acl, "public-read-write"))
                  return "bucket grants a public acl";
                return {};
              }),
          make_typed_check(
              "s3-encryption-configured", "S3 buckets configure server-side encryption",
              {"aws_s3_bucket"},
              [](const nlohmann::json& res) -> std::string {
                if (attr_at(res, {"server_side_encryption_configuration"})) return {};
                return "no server-side encryption configuration";
              }),
          make_typed_check(
              "ebs-volume-encrypted", "EBS volumes are encrypted at rest",
              {"aws_ebs_volume"},
              [](const nlohmann::json& res) -> std::string {
                if (is_true(attr_at(res, {"encrypted"}))) return {};
                return "volume is not encrypted";
              }),
          make_typed_check(
              "db-storage-encrypted", "database storage is encrypted at rest",
              {"aws_db_instance", "aws_rds_cluster"},
              [](const nlohmann::json& res) -> std::string {
                if (is_true(attr_at(res, {"storage_encrypted"}))) return {};
                return "storage_encrypted is not true";
              }),
          make_typed_check(
              "db-not-publicly-accessible", "database instances stay private",
              {"aws_db_instance"},
              [](const nlohmann::json& res) -> std::string {
                auto* v = attr_at(res, {"publicly_accessible"});
                if (!v) return {};
                if (is_computed(v)) return "publicly_accessible cannot be resolved statically";
                if (is_true(v)) return "instance is publicly accessible";
                return {};
              }),
          make_typed_check(
              "sg-no-unrestricted-ingress",
              "security groups do not open ingress to the world",
              {"aws_security_group"},
              [](const nlohmann::json& res) -> std::string {
                std::string msg;
                for_each_entry(attr_at(res, {"ingress"}), [&](const nlohmann::json& rule) {
                  for_each_entry(attr_at(rule, {"cidr_blocks"}), [&](const nlohmann::json& c) {
                    if (c.is_string() &&
                        (c.get<std::string>() == "0.0.0.0/0" || c.get<std::string>() == "::/0"))
                      msg = "ingress rule admits " + c.get<std::string>();
                  });
                });
                return msg;
              }),
          make_typed_check(
              "iam-no-wildcard-actions", "IAM policy documents avoid the * action",
              {"aws_iam_policy", "aws_iam_role_policy", "aws_iam_user_policy"},
              [](const nlohmann::json& res) -> std::string {
                auto* pol = attr_at(res, {"policy"});
                if (!pol || !pol->is_string() || is_computed(pol)) {
                  return "policy document cannot be resolved statically";
                }
                std::string text = pol->get<std::string>();
                std::string squashed;
                for (char c : text) {
                  if (!std::isspace(static_cast<unsigned char>(c))) squashed.push_back(c);
                }
                if (squashed.find("\"Action\":\"*\"") != std::string::npos ||
                    squashed.find("\"Action\":[\"*\"]") != std::string::npos) {
                  return "policy grants the full wildcard action";
                }
                return {};
              }),
          make_typed_check(
              "instance-no-public-ip", "EC2 instances do not auto-assign public IPs",
              {"aws_instance"},
              [](const nlohmann::json& res) -> std::string {
                auto* v = attr_at(res, {"associate_public_ip_address"});
                if (!v) return {};
                if (is_computed(v))
                  return "associate_public_ip_address cannot be resolved statically";
                if (is_true(v)) return "instance requests a public ip";
                return {};
              }),
      },
  };
  return pack;
}

PackResult run_pack(const CheckPack& pack, const hcl::Configuration& config) {
  auto resources = verify::flatten_resources(config);
  CheckContext ctx{config, resources};
  PackResult result;
  for (const auto& check : pack.checks) {
    auto outcome = check.run(ctx);
    result.applicable += outcome.applicable;
    result.passed += outcome.applicable - outcome.findings.size();
    for (auto& f : outcome.findings) result.findings.push_back(std::move(f));
  }
  return result;
}

}  // namespace iacforge::harness
