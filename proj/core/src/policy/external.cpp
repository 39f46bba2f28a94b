#include "iacforge/policy/external.hpp"

#include <filesystem>
#include <random>
#include <regex>

#include "iacforge/util/jsonl.hpp"
#include "iacforge/util/subprocess.hpp"
#include "iacforge/verify/external.hpp"

namespace iacforge::policy {

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    auto base = fs::temp_directory_path();
    std::random_device rd;
    for (int i = 0; i < 64; ++i) {
      auto candidate = base / ("iacforge-opa-" + std::to_string(rd()));
      std::error_code ec;
      if (fs::create_directory(candidate, ec)) {
        path = candidate;
        break;
      }
    }
    if (path.empty()) throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string package_of(const std::string& rego_source) {
  static const std::regex pkg(R"(^\s*package\s+([A-Za-z_][A-Za-z0-9_.]*))",
                              std::regex::multiline);
  std::smatch m;
  if (!std::regex_search(rego_source, m, pkg)) {
    throw PolicyParseError("policy source declares no package");
  }
  return m[1].str();
}

RuleResults query_booleans(const std::string& rego_source, const nlohmann::json& input,
                           const OpaBackend& backend) {
  auto bin = util::resolve_binary(backend.opa_bin.empty() ? "opa" : backend.opa_bin);
  if (!bin) {
    throw verify::BackendUnavailable("opa binary not found" +
                                     (backend.opa_bin.empty() ? std::string()
                                                              : " at '" + backend.opa_bin + "'"));
  }
  std::string pkg = package_of(rego_source);

  TempDir dir;
  util::write_text_file(dir.path / "policy.rego", rego_source);
  util::write_text_file(dir.path / "input.json", input.dump());

  util::RunOptions opts;
  opts.workdir = dir.path.string();
  auto result = util::run_command(
      {*bin, "eval", "--format", "json", "--data", "policy.rego", "--input", "input.json",
       "data." + pkg},
      opts);
  if (!result.ok()) {
    throw PolicyParseError("policy evaluation failed: " +
                           (result.err.empty() ? result.out : result.err));
  }

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(result.out);
  } catch (const nlohmann::json::parse_error& e) {
    throw PolicyParseError(std::string("unexpected engine output: ") + e.what());
  }

  RuleResults results;
  if (!j.contains("result") || j["result"].empty()) return results;
  const auto& exprs = j["result"][0];
  if (!exprs.contains("expressions") || exprs["expressions"].empty()) return results;
  const auto& value = exprs["expressions"][0]["value"];
  if (!value.is_object()) return results;

  for (auto it = value.begin(); it != value.end(); ++it) {
    if (!it.value().is_boolean()) continue;  // helper sets and objects are not rules
    results.per_rule.push_back({it.key(), it.value().get<bool>()});
    ++results.total_count;
    if (it.value().get<bool>()) ++results.passed_count;
  }
  return results;
}

}  // namespace

RuleResults external_policy_eval(const Policy& policy, const verify::PlanDocument& plan,
                                 const OpaBackend& backend) {
  if (!policy.is_external()) {
    throw PolicyFormatError("builtin policy does not need the engine adapter");
  }
  return query_booleans(policy.rego_source, plan.to_json(), backend);
}

int external_count_rules(const Policy& policy, const OpaBackend& backend) {
  if (!policy.is_external()) {
    throw PolicyFormatError("builtin policy does not need the engine adapter");
  }
  auto results = query_booleans(policy.rego_source, nlohmann::json::object(), backend);
  return results.total_count;
}

}  // namespace iacforge::policy
