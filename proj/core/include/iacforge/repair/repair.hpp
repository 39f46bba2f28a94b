#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "iacforge/repair/llm_client.hpp"
#include "iacforge/repair/templates.hpp"

namespace iacforge::repair {

struct ExtractionError : std::runtime_error {
  explicit ExtractionError(const std::string& what) : std::runtime_error(what) {}
};

struct JudgeParseError : std::runtime_error {
  explicit JudgeParseError(const std::string& what) : std::runtime_error(what) {}
};

// Returns the content of the LAST well-formed <tag>...</tag> pair, with a
// surrounding fenced-code block stripped if present. Throws ExtractionError
// when no pair exists or the content is empty.
std::string extract_tagged(const std::string& response, const std::string& tag);

struct JudgeVerdict {
  bool aligned = false;
  std::string feedback;
};

// Asks the client whether the prompt faithfully describes the artifact and
// parses the VERDICT: YES/NO protocol. Throws JudgeParseError when the reply
// carries no verdict line.
JudgeVerdict judge_alignment(const std::string& prompt_nl, const std::string& artifact,
                             LlmClient& llm, const GenerationParams& params = {});

enum class LoopStage { FV1, FV2, FV3, PromptAlign };
std::string_view to_string(LoopStage stage);

enum class Outcome { Repaired, PassedUnchanged, Exhausted, Aborted };
std::string_view to_string(Outcome outcome);

// What the stage verifier says about one candidate artifact.
struct VerifierResult {
  bool passed = false;
  std::string certificate;      // feeds the next repair prompt
  nlohmann::json verdict;       // full machine-readable report
};

using Verifier = std::function<VerifierResult(const std::string& artifact)>;

struct Turn {
  std::string prompt;
  std::string response;
  std::optional<std::string> extracted;  // absent when extraction failed
  bool passed = false;
  std::string certificate;
  nlohmann::json verdict;

  nlohmann::json to_json() const;
};

struct RepairTranscript {
  LoopStage stage = LoopStage::FV1;
  std::vector<Turn> turns;
  Outcome outcome = Outcome::Exhausted;
  int turns_used = 0;
  std::string final_artifact;

  nlohmann::json to_json() const;
};

struct RepairOptions {
  LoopStage stage = LoopStage::FV2;
  int max_turns = 5;
  std::string template_id = "repair-fv2";
  std::string answer_tag = "corrected_terraform_config";
  std::string artifact_slot = "config";  // slot that receives the current artifact
  std::string error_slot = "error_message_TFplan";
  std::map<std::string, std::string> extra_slots;
  GenerationParams params;
};

// Template, tag, and slot wiring for a stage. FV1/FV2 come ready to run with
// packaged few-shot examples; FV3 callers must add {config} and {prompt}
// slots, prompt-alignment callers {config} and {level_instruction}.
RepairOptions default_options(LoopStage stage);

// Verify-first multi-turn repair. A passing artifact returns PASSED_UNCHANGED
// with zero turns; otherwise each turn renders the repair prompt with the
// current artifact and the latest certificate, calls the client, extracts the
// tagged answer, and re-verifies. A failed revision becomes the current
// artifact. Extraction failures burn a turn and flag the next prompt.
// LlmUnavailable aborts mid-loop with the partial transcript attached.
RepairTranscript run_repair_loop(const std::string& artifact, const Verifier& verifier,
                                 LlmClient& llm, const RepairOptions& options);

// Stage-default wiring, FV1/FV2 only.
RepairTranscript run_repair_loop(const std::string& artifact, LoopStage stage,
                                 const Verifier& verifier, LlmClient& llm, int max_turns = 5);

// Stage verifiers over the packaged toolchain, usable as loop callbacks.
Verifier make_fv1_verifier();
Verifier make_fv2_verifier();

}  // namespace iacforge::repair
