#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace iacforge::verify {

enum class Stage { FV1, FV2, FV3 };

std::string_view to_string(Stage stage);

enum class Severity { Error, Warning };

struct SourceLocation {
  std::string file;
  int line = 0;
  int col = 0;
};

// One machine-readable finding. `code` is a short stable identifier
// (DUP_ADDRESS, CYCLE, ...); `subject` names the offending address,
// variable or rule when one exists.
struct Diagnostic {
  Stage stage = Stage::FV1;
  std::string code;
  Severity severity = Severity::Error;
  std::string message;
  std::optional<SourceLocation> location;
  std::optional<std::string> subject;

  nlohmann::json to_json() const;
};

// Outcome of one verification stage. The diagnostics double as the error
// certificate handed to repair prompts.
struct VerdictReport {
  Stage stage = Stage::FV1;
  bool passed = false;
  std::vector<Diagnostic> diagnostics;
  double elapsed_secs = 0.0;
  std::string backend = "builtin";  // "builtin" or "external"

  bool has_error() const;
  // Human-readable certificate text used in repair prompts.
  std::string certificate() const;
  nlohmann::json to_json() const;
};

}  // namespace iacforge::verify
