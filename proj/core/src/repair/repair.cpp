#include "iacforge/repair/repair.hpp"

#include <sstream>

#include "iacforge/verify/verify.hpp"

namespace iacforge::repair {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string strip_fences(std::string content) {
  if (content.rfind("```", 0) == 0) {
    auto first_newline = content.find('\n');
    if (first_newline == std::string::npos) return "";
    content.erase(0, first_newline + 1);
  }
  auto last_fence = content.rfind("```");
  if (last_fence != std::string::npos &&
      trim(content.substr(last_fence)) == "```" &&
      (last_fence == 0 || content[last_fence - 1] == '\n')) {
    content.erase(last_fence);
  }
  return trim(content);
}

// wall-clock timings vary run to run; a replayed session must serialize to
// the same bytes, so verdicts are scrubbed of them before they enter a turn
void scrub_timing(nlohmann::json& j) {
  if (j.is_object()) {
    j.erase("elapsed_secs");
    for (auto& [key, value] : j.items()) scrub_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) scrub_timing(value);
  }
}

}  // namespace

std::string extract_tagged(const std::string& response, const std::string& tag) {
  const std::string open = "<" + tag + ">";
  const std::string close = "</" + tag + ">";

  std::size_t best_start = std::string::npos;
  std::size_t best_end = 0;
  std::size_t pos = 0;
  while ((pos = response.find(open, pos)) != std::string::npos) {
    std::size_t content_start = pos + open.size();
    std::size_t close_pos = response.find(close, content_start);
    if (close_pos == std::string::npos) break;
    best_start = content_start;
    best_end = close_pos;
    pos = close_pos + close.size();
  }
  if (best_start == std::string::npos) {
    throw ExtractionError("no well-formed <" + tag + "> block in the response");
  }
  auto content = strip_fences(trim(response.substr(best_start, best_end - best_start)));
  if (content.empty()) {
    throw ExtractionError("the <" + tag + "> block is empty");
  }
  return content;
}

JudgeVerdict judge_alignment(const std::string& prompt_nl, const std::string& artifact,
                             LlmClient& llm, const GenerationParams& params) {
  auto prompt = render_prompt(builtin_template("judge-align"),
                              {{"prompt", prompt_nl}, {"config", artifact}});
  auto response = llm.complete(prompt, params);

  std::istringstream lines(response);
  std::string line;
  std::optional<bool> verdict;
  std::string feedback;
  bool after_verdict = false;
  while (std::getline(lines, line)) {
    auto at = line.find("VERDICT:");
    if (at != std::string::npos) {
      auto rest = trim(line.substr(at + 8));
      if (rest.rfind("YES", 0) == 0) {
        verdict = true;
        after_verdict = true;
        feedback.clear();
        continue;
      }
      if (rest.rfind("NO", 0) == 0) {
        verdict = false;
        after_verdict = true;
        feedback.clear();
        continue;
      }
    }
    if (after_verdict) {
      if (!feedback.empty()) feedback += "\n";
      feedback += line;
    }
  }
  if (!verdict) {
    throw JudgeParseError("no VERDICT: YES/NO line in the judge reply");
  }
  return JudgeVerdict{*verdict, trim(feedback)};
}

std::string_view to_string(LoopStage stage) {
  switch (stage) {
    case LoopStage::FV1: return "FV1";
    case LoopStage::FV2: return "FV2";
    case LoopStage::FV3: return "FV3";
    case LoopStage::PromptAlign: return "PROMPT_ALIGN";
  }
  return "FV1";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Repaired: return "REPAIRED";
    case Outcome::PassedUnchanged: return "PASSED_UNCHANGED";
    case Outcome::Exhausted: return "EXHAUSTED";
    case Outcome::Aborted: return "ABORTED";
  }
  return "EXHAUSTED";
}

nlohmann::json Turn::to_json() const {
  nlohmann::json scrubbed = verdict;
  scrub_timing(scrubbed);
  nlohmann::json j{
      {"prompt", prompt},
      {"response", response},
      {"passed", passed},
      {"certificate", certificate},
      {"verdict", std::move(scrubbed)},
  };
  if (extracted) j["extracted"] = *extracted;
  return j;
}

nlohmann::json RepairTranscript::to_json() const {
  nlohmann::json turn_arr = nlohmann::json::array();
  for (const auto& t : turns) turn_arr.push_back(t.to_json());
  return nlohmann::json{
      {"stage", std::string(to_string(stage))},
      {"outcome", std::string(to_string(outcome))},
      {"turns_used", turns_used},
      {"turns", std::move(turn_arr)},
      {"final_artifact", final_artifact},
  };
}

RepairOptions default_options(LoopStage stage) {
  RepairOptions opts;
  opts.stage = stage;
  switch (stage) {
    case LoopStage::FV1: {
      opts.template_id = "repair-fv1";
      opts.answer_tag = "corrected_terraform_config";
      opts.artifact_slot = "config";
      opts.error_slot = "error_message_TFvalidate";
      const auto& ex = builtin_default_examples();
      opts.extra_slots = {{"TF_example1", ex[0]}, {"TF_example2", ex[1]}, {"TF_example3", ex[2]}};
      break;
    }
    case LoopStage::FV2: {
      opts.template_id = "repair-fv2";
      opts.answer_tag = "corrected_terraform_config";
      opts.artifact_slot = "config";
      opts.error_slot = "error_message_TFplan";
      const auto& ex = builtin_default_examples();
      opts.extra_slots = {{"TF_example1", ex[0]}, {"TF_example2", ex[1]}, {"TF_example3", ex[2]}};
      break;
    }
    case LoopStage::FV3:
      opts.template_id = "repair-fv3";
      opts.answer_tag = "corrected_policy";
      opts.artifact_slot = "policy";
      opts.error_slot = "error_message_policy";
      break;
    case LoopStage::PromptAlign:
      opts.template_id = "prompt-gen";
      opts.answer_tag = "generated_prompt";
      opts.artifact_slot = "current_prompt";
      opts.error_slot = "feedback";
      break;
  }
  return opts;
}

RepairTranscript run_repair_loop(const std::string& artifact, const Verifier& verifier,
                                 LlmClient& llm, const RepairOptions& options) {
  if (options.max_turns < 1) throw std::invalid_argument("max_turns must be at least 1");

  RepairTranscript transcript;
  transcript.stage = options.stage;

  auto initial = verifier(artifact);
  if (initial.passed) {
    transcript.outcome = Outcome::PassedUnchanged;
    transcript.turns_used = 0;
    transcript.final_artifact = artifact;
    return transcript;
  }

  auto tmpl = builtin_template(options.template_id);
  std::string current = artifact;
  std::string certificate = initial.certificate;
  bool extraction_failed = false;

  for (int turn = 1; turn <= options.max_turns; ++turn) {
    auto slots = options.extra_slots;
    slots[options.artifact_slot] = current;
    std::string error_text = certificate;
    if (extraction_failed) {
      error_text = "note: the previous reply carried no usable <" + options.answer_tag +
                   "> block; reply again with the complete artifact inside those tags.\n" +
                   error_text;
    }
    slots[options.error_slot] = error_text;

    Turn record;
    record.prompt = render_prompt(tmpl, slots);
    try {
      record.response = llm.complete(record.prompt, options.params);
    } catch (LlmUnavailable& e) {
      transcript.outcome = Outcome::Aborted;
      transcript.turns_used = static_cast<int>(transcript.turns.size());
      transcript.final_artifact = current;
      e.partial = std::make_shared<RepairTranscript>(std::move(transcript));
      throw;
    }

    extraction_failed = false;
    std::string candidate;
    try {
      candidate = extract_tagged(record.response, options.answer_tag);
    } catch (const ExtractionError&) {
      record.extracted = std::nullopt;
      record.passed = false;
      record.certificate = certificate;
      transcript.turns.push_back(std::move(record));
      extraction_failed = true;
      continue;  // the prior artifact stays current
    }

    record.extracted = candidate;
    auto result = verifier(candidate);
    record.passed = result.passed;
    record.certificate = result.certificate;
    record.verdict = result.verdict;
    transcript.turns.push_back(std::move(record));

    if (result.passed) {
      transcript.outcome = Outcome::Repaired;
      transcript.turns_used = turn;
      transcript.final_artifact = candidate;
      return transcript;
    }
    current = candidate;
    certificate = result.certificate;
  }

  transcript.outcome = Outcome::Exhausted;
  transcript.turns_used = options.max_turns;
  transcript.final_artifact = current;
  return transcript;
}

RepairTranscript run_repair_loop(const std::string& artifact, LoopStage stage,
                                 const Verifier& verifier, LlmClient& llm, int max_turns) {
  if (stage != LoopStage::FV1 && stage != LoopStage::FV2) {
    throw std::invalid_argument("stage-default wiring exists only for FV1 and FV2; "
                                "use the options overload");
  }
  auto opts = default_options(stage);
  opts.max_turns = max_turns;
  return run_repair_loop(artifact, verifier, llm, opts);
}

Verifier make_fv1_verifier() {
  return [](const std::string& artifact) {
    auto report = verify::validate_text(artifact);
    return VerifierResult{report.passed, report.certificate(), report.to_json()};
  };
}

Verifier make_fv2_verifier() {
  return [](const std::string& artifact) {
    auto [report, doc] = verify::plan_text(artifact);
    return VerifierResult{report.passed, report.certificate(), report.to_json()};
  };
}

}  // namespace iacforge::repair
