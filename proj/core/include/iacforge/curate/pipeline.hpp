#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacforge/curate/curate.hpp"
#include "iacforge/repair/llm_client.hpp"
#include "iacforge/repair/repair.hpp"

namespace iacforge::curate {

// A verified seed item: deployable configuration, judge-aligned prompt, and a
// policy the configuration passes in full.
struct SeedTriplet {
  std::string repo_id;
  std::string module_path;
  std::string prompt_nl;
  std::string target;
  policy::Policy policy;
  repair::PromptLevel prompt_level = repair::PromptLevel::Mid;

  nlohmann::json to_json() const;
  static SeedTriplet from_json(const nlohmann::json& j);
};

struct DropRecord {
  std::string repo_id;
  std::string module_path;
  std::string stage;
  std::string reason;

  nlohmann::json to_json() const;
};

// Append-only progress log keyed by (repo_id, module_path, stage). A key that
// was logged as done or dropped is never re-worked; its payload is replayed
// instead, so a resumed run converges on the same output without duplicate
// ids and without repeating client calls.
class Checkpoint {
 public:
  Checkpoint() = default;  // in-memory only
  explicit Checkpoint(std::filesystem::path log_path);

  bool known(const std::string& repo_id, const std::string& module_path,
             const std::string& stage) const;
  // nullopt for unknown or dropped keys.
  std::optional<nlohmann::json> payload(const std::string& repo_id,
                                        const std::string& module_path,
                                        const std::string& stage) const;
  // nullopt unless the key was recorded as dropped.
  std::optional<std::string> dropped_reason(const std::string& repo_id,
                                            const std::string& module_path,
                                            const std::string& stage) const;
  // Both return false (and change nothing) when the key is already recorded.
  bool record_done(const std::string& repo_id, const std::string& module_path,
                   const std::string& stage, nlohmann::json payload);
  bool record_dropped(const std::string& repo_id, const std::string& module_path,
                      const std::string& stage, const std::string& reason);

 private:
  struct Entry {
    bool dropped = false;
    std::string reason;
    nlohmann::json payload;
  };
  static std::string key(const std::string& repo_id, const std::string& module_path,
                         const std::string& stage);

  std::filesystem::path log_path_;
  std::map<std::string, Entry> entries_;
  mutable std::mutex mu_;
};

struct PipelineOptions {
  int max_turns = 5;
  repair::GenerationParams params;
  std::set<std::string> provider_allowlist = default_provider_allowlist();
  repair::PromptLevel prompt_level = repair::PromptLevel::Mid;
  std::filesystem::path checkpoint_path;  // empty: no persistence
  std::filesystem::path dropped_path;     // empty: drops only returned in memory
};

struct StageCounts {
  std::size_t ingested = 0;
  std::size_t provider_filtered = 0;  // dropped by the allowlist
  std::size_t fv1_repaired = 0;
  std::size_t fv1_passed_unchanged = 0;
  std::size_t deduplicated = 0;  // dropped as duplicates
  std::size_t fv2_passed = 0;
  std::size_t prompts_aligned = 0;
  std::size_t policies_verified = 0;

  nlohmann::json to_json() const;
};

struct SeedResult {
  std::vector<SeedTriplet> triplets;
  std::vector<DropRecord> dropped;
  StageCounts counts;
};

// Runs the staged seed pipeline over ingested modules: provider filtering,
// syntax repair, re-filtering, dedup, deployability repair, prompt generation
// with judge-guided refinement, and policy generation with evaluation-guided
// repair. Every emitted triplet satisfies the full verification ladder.
// LlmUnavailable aborts the batch; completed items survive in the checkpoint.
SeedResult build_seed_corpus(const std::vector<ModuleEntry>& modules, repair::LlmClient& llm,
                             const PipelineOptions& options = {});

struct GenResult {
  std::vector<GenRecord> records;
  std::vector<DropRecord> dropped;
};

// Emits one GenRecord per triplet plus at most one verified clone: a
// configuration distinct from the target after canonicalization that passes
// deployability and the triplet's own policy.
GenResult curate_gen(const std::vector<SeedTriplet>& triplets, repair::LlmClient& llm,
                     const PipelineOptions& options = {});

struct MutnResult {
  std::vector<MutnRecord> records;
  std::vector<DropRecord> dropped;
};

// Emits one MutnRecord per triplet: a change request, the mutated
// configuration, and an updated policy, all machine-verified and
// judge-approved, with the updated policy canonically different from the
// initial one.
MutnResult curate_mutn(const std::vector<SeedTriplet>& triplets, repair::LlmClient& llm,
                       const PipelineOptions& options = {});

}  // namespace iacforge::curate
