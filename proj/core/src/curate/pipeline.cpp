#include "iacforge/curate/pipeline.hpp"

#include <filesystem>

#include "iacforge/hcl/canonical.hpp"
#include "iacforge/hcl/parser.hpp"
#include "iacforge/reward/reward.hpp"
#include "iacforge/util/jsonl.hpp"
#include "iacforge/verify/verify.hpp"

namespace iacforge::curate {

namespace fs = std::filesystem;

namespace {

const char* kReasonProvider = "provider outside the allowlist";
const char* kReasonProviderAfter = "provider outside the allowlist after repair";
const char* kReasonDuplicate = "duplicate of an earlier module";

std::string record_id(const std::string& repo_id, const std::string& module_path) {
  return module_path == "." ? repo_id : repo_id + "/" + module_path;
}

// The most precise failing certificate a scored candidate produced.
std::string failure_certificate(const reward::RewardBreakdown& rb) {
  if (!rb.fv1.passed) return rb.fv1.certificate();
  if (rb.fv2 && !rb.fv2->passed) return rb.fv2->certificate();
  if (rb.fv3 && !rb.fv3->all_passed()) return rb.fv3->certificate();
  return "verification failed";
}

}  // namespace

nlohmann::json SeedTriplet::to_json() const {
  return nlohmann::json{
      {"v", 1},
      {"repo_id", repo_id},
      {"module_path", module_path},
      {"prompt_nl", prompt_nl},
      {"target", target},
      {"policy", policy.to_json()},
      {"prompt_level", std::string(repair::to_string(prompt_level))},
  };
}

SeedTriplet SeedTriplet::from_json(const nlohmann::json& j) {
  SeedTriplet t;
  t.repo_id = j.at("repo_id").get<std::string>();
  t.module_path = j.at("module_path").get<std::string>();
  t.prompt_nl = j.at("prompt_nl").get<std::string>();
  t.target = j.at("target").get<std::string>();
  t.policy = policy_from_json(j.at("policy"));
  t.prompt_level = repair::prompt_level_from_string(j.at("prompt_level").get<std::string>());
  return t;
}

nlohmann::json DropRecord::to_json() const {
  return nlohmann::json{
      {"repo_id", repo_id}, {"module_path", module_path}, {"stage", stage}, {"reason", reason}};
}

nlohmann::json StageCounts::to_json() const {
  return nlohmann::json{
      {"ingested", ingested},
      {"provider_filtered", provider_filtered},
      {"fv1_repaired", fv1_repaired},
      {"fv1_passed_unchanged", fv1_passed_unchanged},
      {"deduplicated", deduplicated},
      {"fv2_passed", fv2_passed},
      {"prompts_aligned", prompts_aligned},
      {"policies_verified", policies_verified},
  };
}

std::string Checkpoint::key(const std::string& repo_id, const std::string& module_path,
                            const std::string& stage) {
  return repo_id + "\x1f" + module_path + "\x1f" + stage;
}

Checkpoint::Checkpoint(fs::path log_path) : log_path_(std::move(log_path)) {
  if (log_path_.empty()) return;
  std::error_code ec;
  if (!fs::exists(log_path_, ec)) return;
  for (const auto& row : util::read_jsonl(log_path_)) {
    Entry entry;
    entry.dropped = row.value("status", "") == "dropped";
    if (entry.dropped) {
      entry.reason = row.value("reason", "");
    } else {
      entry.payload = row.value("payload", nlohmann::json());
    }
    entries_[key(row.at("repo_id").get<std::string>(), row.at("module_path").get<std::string>(),
                 row.at("stage").get<std::string>())] = std::move(entry);
  }
}

bool Checkpoint::known(const std::string& repo_id, const std::string& module_path,
                       const std::string& stage) const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.count(key(repo_id, module_path, stage)) > 0;
}

std::optional<nlohmann::json> Checkpoint::payload(const std::string& repo_id,
                                                  const std::string& module_path,
                                                  const std::string& stage) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key(repo_id, module_path, stage));
  if (it == entries_.end() || it->second.dropped) return std::nullopt;
  return it->second.payload;
}

std::optional<std::string> Checkpoint::dropped_reason(const std::string& repo_id,
                                                      const std::string& module_path,
                                                      const std::string& stage) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key(repo_id, module_path, stage));
  if (it == entries_.end() || !it->second.dropped) return std::nullopt;
  return it->second.reason;
}

bool Checkpoint::record_done(const std::string& repo_id, const std::string& module_path,
                             const std::string& stage, nlohmann::json payload) {
  std::lock_guard<std::mutex> lock(mu_);
  auto k = key(repo_id, module_path, stage);
  if (entries_.count(k)) return false;
  Entry entry;
  entry.payload = payload;
  entries_[k] = std::move(entry);
  if (!log_path_.empty()) {
    util::append_jsonl(log_path_, nlohmann::json{{"repo_id", repo_id},
                                                 {"module_path", module_path},
                                                 {"stage", stage},
                                                 {"status", "done"},
                                                 {"payload", std::move(payload)}});
  }
  return true;
}

bool Checkpoint::record_dropped(const std::string& repo_id, const std::string& module_path,
                                const std::string& stage, const std::string& reason) {
  std::lock_guard<std::mutex> lock(mu_);
  auto k = key(repo_id, module_path, stage);
  if (entries_.count(k)) return false;
  Entry entry;
  entry.dropped = true;
  entry.reason = reason;
  entries_[k] = std::move(entry);
  if (!log_path_.empty()) {
    util::append_jsonl(log_path_, nlohmann::json{{"repo_id", repo_id},
                                                 {"module_path", module_path},
                                                 {"stage", stage},
                                                 {"status", "dropped"},
                                                 {"reason", reason}});
  }
  return true;
}

namespace {

// Shared drop bookkeeping: progress log, optional drop file, in-memory list.
struct DropSink {
  Checkpoint& cp;
  const fs::path& dropped_path;
  std::vector<DropRecord>& out;

  void drop(const std::string& repo_id, const std::string& module_path, const std::string& stage,
            const std::string& reason) {
    DropRecord rec{repo_id, module_path, stage, reason};
    bool fresh = cp.record_dropped(repo_id, module_path, stage, reason);
    if (fresh && !dropped_path.empty()) util::append_jsonl(dropped_path, rec.to_json());
    out.push_back(std::move(rec));
  }

  // A drop replayed from the progress log: list it, never re-append it.
  void replay(const std::string& repo_id, const std::string& module_path,
              const std::string& stage, const std::string& reason) {
    out.push_back(DropRecord{repo_id, module_path, stage, reason});
  }
};

}  // namespace

SeedResult build_seed_corpus(const std::vector<ModuleEntry>& modules, repair::LlmClient& llm,
                             const PipelineOptions& options) {
  Checkpoint cp(options.checkpoint_path);
  SeedResult result;
  result.counts.ingested = modules.size();
  DropSink sink{cp, options.dropped_path, result.dropped};

  auto fv1_verifier = repair::make_fv1_verifier();
  auto fv2_verifier = repair::make_fv2_verifier();

  struct Fv1Item {
    const ModuleEntry* entry;
    std::string text;
  };
  std::vector<Fv1Item> fv1_out;

  for (const auto& m : modules) {
    if (cp.known(m.repo_id, m.module_path, "fv1")) {
      if (auto payload = cp.payload(m.repo_id, m.module_path, "fv1")) {
        if ((*payload)["repaired"].get<bool>()) {
          ++result.counts.fv1_repaired;
        } else {
          ++result.counts.fv1_passed_unchanged;
        }
        fv1_out.push_back({&m, (*payload)["text"].get<std::string>()});
      } else {
        auto reason = *cp.dropped_reason(m.repo_id, m.module_path, "fv1");
        if (reason == kReasonProvider || reason == kReasonProviderAfter) {
          ++result.counts.provider_filtered;
        }
        sink.replay(m.repo_id, m.module_path, "fv1", reason);
      }
      continue;
    }

    bool parsed_initially = false;
    try {
      auto config = hcl::parse_config(m.text);
      parsed_initially = true;
      if (!filter_providers(config, options.provider_allowlist)) {
        ++result.counts.provider_filtered;
        sink.drop(m.repo_id, m.module_path, "fv1", kReasonProvider);
        continue;
      }
    } catch (const hcl::ParseError&) {
      // unfilterable until the syntax repair loop makes it parseable
    }

    auto transcript =
        repair::run_repair_loop(m.text, repair::LoopStage::FV1, fv1_verifier, llm,
                                options.max_turns);
    if (transcript.outcome == repair::Outcome::Exhausted) {
      sink.drop(m.repo_id, m.module_path, "fv1", "syntax repair budget exhausted");
      continue;
    }
    bool repaired = transcript.outcome == repair::Outcome::Repaired;
    const std::string& text = transcript.final_artifact;

    if (repaired || !parsed_initially) {
      if (!filter_providers(hcl::parse_config(text), options.provider_allowlist)) {
        ++result.counts.provider_filtered;
        sink.drop(m.repo_id, m.module_path, "fv1", kReasonProviderAfter);
        continue;
      }
    }

    cp.record_done(m.repo_id, m.module_path, "fv1",
                   nlohmann::json{{"text", text}, {"repaired", repaired}});
    if (repaired) {
      ++result.counts.fv1_repaired;
    } else {
      ++result.counts.fv1_passed_unchanged;
    }
    fv1_out.push_back({&m, text});
  }

  // First occurrence per canonical hash survives; later copies are dropped.
  std::set<std::string> seen_hashes;
  std::vector<Fv1Item> unique_items;
  for (auto& item : fv1_out) {
    auto hash = hcl::parse_config(item.text).canonical_hash;
    if (!seen_hashes.insert(hash).second) {
      ++result.counts.deduplicated;
      sink.drop(item.entry->repo_id, item.entry->module_path, "dedup", kReasonDuplicate);
      continue;
    }
    unique_items.push_back(std::move(item));
  }

  for (const auto& item : unique_items) {
    const auto& m = *item.entry;
    if (cp.known(m.repo_id, m.module_path, "seed")) {
      if (auto payload = cp.payload(m.repo_id, m.module_path, "seed")) {
        result.triplets.push_back(SeedTriplet::from_json(*payload));
        ++result.counts.fv2_passed;
        ++result.counts.prompts_aligned;
        ++result.counts.policies_verified;
      } else {
        sink.replay(m.repo_id, m.module_path, "seed",
                    *cp.dropped_reason(m.repo_id, m.module_path, "seed"));
      }
      continue;
    }

    auto fv2_transcript = repair::run_repair_loop(item.text, repair::LoopStage::FV2,
                                                  fv2_verifier, llm, options.max_turns);
    if (fv2_transcript.outcome == repair::Outcome::Exhausted) {
      sink.drop(m.repo_id, m.module_path, "seed", "deployability repair budget exhausted");
      continue;
    }
    const std::string& target = fv2_transcript.final_artifact;
    if (!filter_providers(hcl::parse_config(target), options.provider_allowlist)) {
      ++result.counts.provider_filtered;
      sink.drop(m.repo_id, m.module_path, "seed", kReasonProviderAfter);
      continue;
    }
    ++result.counts.fv2_passed;

    // prompt: one fresh draft, then judge-guided refinement
    auto level_inst = repair::level_instruction(options.prompt_level);
    auto draft_prompt = repair::render_prompt(repair::builtin_template("prompt-gen"),
                                              {{"config", target},
                                               {"level_instruction", level_inst},
                                               {"current_prompt", "(none)"},
                                               {"feedback", "(none)"}});
    auto draft_response = llm.complete(draft_prompt, options.params);
    std::string prompt_nl;
    try {
      prompt_nl = repair::extract_tagged(draft_response, "generated_prompt");
    } catch (const repair::ExtractionError&) {
      sink.drop(m.repo_id, m.module_path, "seed", "prompt extraction failed");
      continue;
    }

    repair::Verifier judge = [&](const std::string& candidate) {
      try {
        auto verdict = repair::judge_alignment(candidate, target, llm, options.params);
        return repair::VerifierResult{
            verdict.aligned,
            verdict.feedback.empty() ? "the reviewer approved the prompt" : verdict.feedback,
            nlohmann::json{{"aligned", verdict.aligned}, {"feedback", verdict.feedback}}};
      } catch (const repair::JudgeParseError& e) {
        return repair::VerifierResult{
            false, std::string("the reviewer reply could not be parsed: ") + e.what(), {}};
      }
    };
    auto align_opts = repair::default_options(repair::LoopStage::PromptAlign);
    align_opts.max_turns = options.max_turns;
    align_opts.params = options.params;
    align_opts.extra_slots = {{"config", target}, {"level_instruction", level_inst}};
    auto align_transcript = repair::run_repair_loop(prompt_nl, judge, llm, align_opts);
    if (align_transcript.outcome == repair::Outcome::Exhausted) {
      sink.drop(m.repo_id, m.module_path, "seed", "prompt alignment budget exhausted");
      continue;
    }
    prompt_nl = align_transcript.final_artifact;
    ++result.counts.prompts_aligned;

    // policy: one fresh draft, then evaluation-guided repair
    auto [fv2_report, plan_doc] = verify::plan_text(target);
    auto policy_prompt = repair::render_prompt(repair::builtin_template("policy-gen"),
                                               {{"config", target}, {"prompt", prompt_nl}});
    auto policy_response = llm.complete(policy_prompt, options.params);
    std::string policy_text;
    try {
      policy_text = repair::extract_tagged(policy_response, "generated_policy");
    } catch (const repair::ExtractionError&) {
      sink.drop(m.repo_id, m.module_path, "seed", "policy extraction failed");
      continue;
    }

    repair::Verifier fv3 = [&](const std::string& candidate) {
      try {
        auto pol = policy::parse_policy_json(candidate);
        if (pol.is_external()) {
          return repair::VerifierResult{
              false, "the policy must be a JSON rule set evaluable in-process", {}};
        }
        auto rules = policy::evaluate_policy(pol, *plan_doc);
        return repair::VerifierResult{rules.all_passed(), rules.certificate(), rules.to_json()};
      } catch (const policy::EmptyPolicy&) {
        return repair::VerifierResult{
            false, "the policy has no rules; cover the prompt's intent", {}};
      } catch (const policy::PolicyFormatError& e) {
        return repair::VerifierResult{false, std::string("the policy does not parse: ") + e.what(),
                                      {}};
      }
    };
    auto fv3_opts = repair::default_options(repair::LoopStage::FV3);
    fv3_opts.max_turns = options.max_turns;
    fv3_opts.params = options.params;
    fv3_opts.extra_slots = {{"config", target}, {"prompt", prompt_nl}};
    auto fv3_transcript = repair::run_repair_loop(policy_text, fv3, llm, fv3_opts);
    if (fv3_transcript.outcome == repair::Outcome::Exhausted) {
      sink.drop(m.repo_id, m.module_path, "seed", "policy repair budget exhausted");
      continue;
    }
    auto policy = policy::parse_policy_json(fv3_transcript.final_artifact);
    ++result.counts.policies_verified;

    auto breakdown = reward::compute_reward_text(target, policy);
    if (breakdown.reward != 2.0) {
      sink.drop(m.repo_id, m.module_path, "seed", "emission guarantee violated: " +
                                                      failure_certificate(breakdown));
      continue;
    }

    SeedTriplet triplet{m.repo_id, m.module_path, prompt_nl, target, policy,
                        options.prompt_level};
    cp.record_done(m.repo_id, m.module_path, "seed", triplet.to_json());
    result.triplets.push_back(std::move(triplet));
  }

  return result;
}

GenResult curate_gen(const std::vector<SeedTriplet>& triplets, repair::LlmClient& llm,
                     const PipelineOptions& options) {
  Checkpoint cp(options.checkpoint_path);
  GenResult result;
  DropSink sink{cp, options.dropped_path, result.dropped};

  for (const auto& t : triplets) {
    if (cp.known(t.repo_id, t.module_path, "gen")) {
      if (auto payload = cp.payload(t.repo_id, t.module_path, "gen")) {
        for (const auto& rj : (*payload)["records"]) {
          result.records.push_back(GenRecord::from_json(rj));
        }
        for (const auto& dj : payload->value("drops", nlohmann::json::array())) {
          sink.replay(dj["repo_id"].get<std::string>(), dj["module_path"].get<std::string>(),
                      dj["stage"].get<std::string>(), dj["reason"].get<std::string>());
        }
      } else {
        sink.replay(t.repo_id, t.module_path, "gen",
                    *cp.dropped_reason(t.repo_id, t.module_path, "gen"));
      }
      continue;
    }

    auto seed_score = reward::compute_reward_text(t.target, t.policy);
    if (seed_score.reward != 2.0) {
      sink.drop(t.repo_id, t.module_path, "gen",
                "seed no longer passes its own policy: " + failure_certificate(seed_score));
      continue;
    }

    GenRecord seed;
    seed.id = record_id(t.repo_id, t.module_path);
    seed.prompt_nl = t.prompt_nl;
    seed.target = t.target;
    seed.policy = t.policy;
    seed.repo_id = t.repo_id;
    seed.module_path = t.module_path;
    seed.is_clone = false;
    seed.prompt_level = t.prompt_level;

    auto target_hash = hcl::parse_config(t.target).canonical_hash;
    std::optional<GenRecord> clone;
    std::string feedback = "(none - first attempt)";
    for (int turn = 1; turn <= options.max_turns && !clone; ++turn) {
      auto prompt = repair::render_prompt(
          repair::builtin_template("clone-gen"),
          {{"prompt", t.prompt_nl}, {"config", t.target}, {"feedback", feedback}});
      auto response = llm.complete(prompt, options.params);
      std::string candidate;
      try {
        candidate = repair::extract_tagged(response, "cloned_terraform_config");
      } catch (const repair::ExtractionError&) {
        feedback = "the reply carried no usable <cloned_terraform_config> block; return the "
                   "complete configuration inside those tags.";
        continue;
      }
      try {
        if (hcl::parse_config(candidate).canonical_hash == target_hash) {
          feedback = "the configuration is identical to the existing one after canonical "
                     "formatting; produce a structurally different configuration.";
          continue;
        }
      } catch (const hcl::ParseError& e) {
        feedback = std::string("the configuration does not parse: ") + e.what();
        continue;
      }
      auto score = reward::compute_reward_text(candidate, t.policy);
      if (score.reward != 2.0) {
        feedback = failure_certificate(score);
        continue;
      }
      clone = seed;
      clone->id = seed.id + ":clone";
      clone->target = candidate;
      clone->is_clone = true;
    }

    nlohmann::json payload{{"records", nlohmann::json::array({seed.to_json()})}};
    result.records.push_back(seed);
    if (clone) {
      payload["records"].push_back(clone->to_json());
      result.records.push_back(*clone);
    } else {
      DropRecord drop_rec{t.repo_id, t.module_path, "gen", "clone budget exhausted"};
      payload["drops"] = nlohmann::json::array({drop_rec.to_json()});
      if (!options.dropped_path.empty()) util::append_jsonl(options.dropped_path, drop_rec.to_json());
      result.dropped.push_back(std::move(drop_rec));
    }
    cp.record_done(t.repo_id, t.module_path, "gen", std::move(payload));
  }
  return result;
}

MutnResult curate_mutn(const std::vector<SeedTriplet>& triplets, repair::LlmClient& llm,
                       const PipelineOptions& options) {
  Checkpoint cp(options.checkpoint_path);
  MutnResult result;
  DropSink sink{cp, options.dropped_path, result.dropped};

  for (const auto& t : triplets) {
    if (cp.known(t.repo_id, t.module_path, "mutn")) {
      if (auto payload = cp.payload(t.repo_id, t.module_path, "mutn")) {
        result.records.push_back(MutnRecord::from_json(*payload));
      } else {
        sink.replay(t.repo_id, t.module_path, "mutn",
                    *cp.dropped_reason(t.repo_id, t.module_path, "mutn"));
      }
      continue;
    }

    auto initial_score = reward::compute_reward_text(t.target, t.policy);
    if (initial_score.reward != 2.0) {
      sink.drop(t.repo_id, t.module_path, "mutn",
                "seed no longer passes its own policy: " + failure_certificate(initial_score));
      continue;
    }

    std::optional<MutnRecord> record;
    std::string feedback = "(none - first attempt)";
    for (int turn = 1; turn <= options.max_turns && !record; ++turn) {
      auto prompt = repair::render_prompt(repair::builtin_template("mutation-gen"),
                                          {{"config", t.target}, {"feedback", feedback}});
      auto response = llm.complete(prompt, options.params);

      std::string prompt_m, mutated, policy_text;
      try {
        prompt_m = repair::extract_tagged(response, "mutation_prompt");
        mutated = repair::extract_tagged(response, "mutated_terraform_config");
        policy_text = repair::extract_tagged(response, "mutated_policy");
      } catch (const repair::ExtractionError& e) {
        feedback = std::string("the reply is missing a required block (") + e.what() +
                   "); return all three tagged blocks.";
        continue;
      }

      policy::Policy policy_m;
      try {
        policy_m = policy::parse_policy_json(policy_text);
      } catch (const policy::EmptyPolicy&) {
        feedback = "the updated policy has no rules.";
        continue;
      } catch (const policy::PolicyFormatError& e) {
        feedback = std::string("the updated policy does not parse: ") + e.what();
        continue;
      }
      if (policy_m.canonical_text() == t.policy.canonical_text()) {
        feedback = "the updated policy is identical to the initial policy; it must reflect "
                   "the requested change.";
        continue;
      }

      auto score = reward::compute_reward_text(mutated, policy_m);
      if (score.reward != 2.0) {
        feedback = failure_certificate(score);
        continue;
      }

      try {
        auto verdict = repair::judge_alignment(prompt_m, mutated, llm, options.params);
        if (!verdict.aligned) {
          feedback = verdict.feedback.empty() ? "the reviewer rejected the change request."
                                              : verdict.feedback;
          continue;
        }
      } catch (const repair::JudgeParseError& e) {
        feedback = std::string("the reviewer reply could not be parsed: ") + e.what();
        continue;
      }

      MutnRecord r;
      r.id = record_id(t.repo_id, t.module_path) + ":mutn";
      r.prompt_m = prompt_m;
      r.initial = t.target;
      r.mutated = mutated;
      r.policy_init = t.policy;
      r.policy_m = policy_m;
      r.repo_id = t.repo_id;
      r.module_path = t.module_path;
      record = std::move(r);
    }

    if (record) {
      cp.record_done(t.repo_id, t.module_path, "mutn", record->to_json());
      result.records.push_back(std::move(*record));
    } else {
      sink.drop(t.repo_id, t.module_path, "mutn", "mutation budget exhausted");
    }
  }
  return result;
}

}  // namespace iacforge::curate
