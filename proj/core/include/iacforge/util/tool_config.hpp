#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace iacforge::util {

// Runtime settings shared by the CLI and the service. Values come from an
// optional flat TOML file, then environment overrides, then per-invocation
// flags applied by the caller.
struct ToolConfig {
  std::string backend = "builtin";  // "builtin" or "external"
  std::string terraform_bin;
  std::string opa_bin;
  std::string tflint_bin;
  std::string checkov_bin;
  std::string llm_endpoint;
  std::string llm_model;
  double llm_temperature = 0.2;
  int llm_max_tokens = 4096;
  int workers = 0;  // 0 means "use the host CPU count"
  int timeout_secs = 30;
  int max_turns = 5;
  int port = 8080;

  int effective_workers() const;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Parses the flat key = value subset of TOML used by iacforge.toml: string,
// integer, float and boolean values, full-line or trailing # comments, no
// tables or arrays. Unknown keys are rejected so typos fail loudly.
ToolConfig parse_tool_config(const std::string& text);

// Loads `path` if given, else ./iacforge.toml if present, else defaults.
// Environment variables override file values: IACFORGE_TERRAFORM_BIN,
// IACFORGE_OPA_BIN, IACFORGE_TFLINT_BIN, IACFORGE_CHECKOV_BIN.
ToolConfig load_tool_config(const std::optional<std::filesystem::path>& path = std::nullopt);

}  // namespace iacforge::util
