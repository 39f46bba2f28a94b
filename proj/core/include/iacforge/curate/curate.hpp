#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "iacforge/hcl/ast.hpp"
#include "iacforge/policy/policy.hpp"
#include "iacforge/repair/templates.hpp"

namespace iacforge::curate {

// A generation example: natural-language prompt, target configuration, and
// the policy the target provably satisfies.
struct GenRecord {
  std::string id;
  std::string prompt_nl;
  std::string target;
  policy::Policy policy;
  std::string repo_id;
  std::string module_path;
  bool is_clone = false;
  repair::PromptLevel prompt_level = repair::PromptLevel::Mid;

  nlohmann::json to_json() const;
  static GenRecord from_json(const nlohmann::json& j);
};

// A mutation example: change request, initial and mutated configurations, and
// the policies each one satisfies.
struct MutnRecord {
  std::string id;
  std::string prompt_m;
  std::string initial;
  std::string mutated;
  policy::Policy policy_init;
  policy::Policy policy_m;
  std::string repo_id;
  std::string module_path;

  nlohmann::json to_json() const;
  static MutnRecord from_json(const nlohmann::json& j);
};

struct ModuleEntry {
  std::string repo_id;
  std::string module_path;  // relative to the repo root, "." for the root itself
  std::string text;
};

struct IngestLog {
  int modules = 0;
  int unreadable_files = 0;
};

// Walks a tree of repositories. The first path component under `tree` is the
// repo id; every directory holding at least one direct .tf file is a module,
// its text the blank-line-joined concatenation of those files in lexicographic
// order. Unreadable files are counted and skipped. Deterministic order.
std::vector<ModuleEntry> ingest(const std::filesystem::path& tree, IngestLog* log = nullptr);

// Same contract, but the modules are named explicitly by a JSON-Lines
// manifest of {repo_id, path} rows (paths absolute or manifest-relative).
std::vector<ModuleEntry> ingest_manifest(const std::filesystem::path& manifest,
                                         IngestLog* log = nullptr);

// The utility providers kept alongside aws during corpus filtering.
const std::set<std::string>& default_provider_allowlist();

// Rebuilds a policy from its serialized form, external source included.
policy::Policy policy_from_json(const nlohmann::json& j);

// Keep iff every provider block name and every resource-type prefix (the part
// before the first underscore, for resource and data blocks) is allowlisted.
bool filter_providers(const hcl::Configuration& config, const std::set<std::string>& allowlist);

// Keeps the first occurrence per canonical hash, preserving input order.
std::vector<hcl::Configuration> dedup(const std::vector<hcl::Configuration>& items);

struct InsufficientSingleModuleRepos : std::runtime_error {
  InsufficientSingleModuleRepos(std::size_t target, std::size_t available)
      : std::runtime_error("test split wants " + std::to_string(target) +
                           " records but single-module repos hold only " +
                           std::to_string(available)) {}
};

struct SplitSpec {
  std::uint64_t seed = 0;
  std::size_t test_count = 0;
};

struct SplitResult {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Splits records (given as their (repo_id, module_path) keys) into train and
// test. Test records come only from repos with exactly one distinct module;
// whole repos are drawn in seeded shuffle order while they fit under the
// target, so train and test never share a repo. Deterministic per seed.
SplitResult split_records(const std::vector<std::pair<std::string, std::string>>& repo_modules,
                          const SplitSpec& spec);

struct MetricSummary {
  std::size_t min = 0;
  std::size_t median = 0;  // lower-middle element for even counts
  std::size_t max = 0;
};

struct StatSummary {
  std::size_t count = 0;
  MetricSummary providers;
  MetricSummary resources;
  MetricSummary loc;
  MetricSummary prompt_words;
  double pct_with_policy = 0.0;

  nlohmann::json to_json() const;
};

std::optional<StatSummary> gen_split_stats(const std::vector<GenRecord>& records);
std::optional<StatSummary> mutn_split_stats(const std::vector<MutnRecord>& records);

// Summary table over the four emitted splits; empty splits appear as null.
nlohmann::json dataset_stats(const std::vector<GenRecord>& gen_train,
                             const std::vector<GenRecord>& gen_test,
                             const std::vector<MutnRecord>& mutn_train,
                             const std::vector<MutnRecord>& mutn_test);

}  // namespace iacforge::curate
