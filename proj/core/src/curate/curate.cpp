#include "iacforge/curate/curate.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "iacforge/hcl/canonical.hpp"
#include "iacforge/util/jsonl.hpp"
#include "iacforge/util/sha256.hpp"
#include "iacforge/verify/verify.hpp"

namespace iacforge::curate {

namespace fs = std::filesystem;

policy::Policy policy_from_json(const nlohmann::json& pj) {
  if (pj.contains("rego") && pj["rego"].is_string() &&
      !pj["rego"].get<std::string>().empty()) {
    return policy::policy_from_rego(pj.value("id", ""), pj["rego"].get<std::string>());
  }
  return policy::parse_policy_json(pj.dump());
}

namespace {

void require_schema(const nlohmann::json& j, const char* what) {
  if (j.value("v", 0) != 1) {
    throw std::runtime_error(std::string(what) + " record has unsupported schema version");
  }
}

}  // namespace

nlohmann::json GenRecord::to_json() const {
  return nlohmann::json{
      {"v", 1},
      {"id", id},
      {"prompt_nl", prompt_nl},
      {"target", target},
      {"policy", policy.to_json()},
      {"repo_id", repo_id},
      {"module_path", module_path},
      {"is_clone", is_clone},
      {"prompt_level", std::string(repair::to_string(prompt_level))},
  };
}

GenRecord GenRecord::from_json(const nlohmann::json& j) {
  require_schema(j, "generation");
  GenRecord r;
  r.id = j.at("id").get<std::string>();
  r.prompt_nl = j.at("prompt_nl").get<std::string>();
  r.target = j.at("target").get<std::string>();
  r.policy = policy_from_json(j.at("policy"));
  r.repo_id = j.at("repo_id").get<std::string>();
  r.module_path = j.at("module_path").get<std::string>();
  r.is_clone = j.at("is_clone").get<bool>();
  r.prompt_level = repair::prompt_level_from_string(j.at("prompt_level").get<std::string>());
  return r;
}

nlohmann::json MutnRecord::to_json() const {
  return nlohmann::json{
      {"v", 1},
      {"id", id},
      {"prompt_m", prompt_m},
      {"initial", initial},
      {"mutated", mutated},
      {"policy_init", policy_init.to_json()},
      {"policy_m", policy_m.to_json()},
      {"repo_id", repo_id},
      {"module_path", module_path},
  };
}

MutnRecord MutnRecord::from_json(const nlohmann::json& j) {
  require_schema(j, "mutation");
  MutnRecord r;
  r.id = j.at("id").get<std::string>();
  r.prompt_m = j.at("prompt_m").get<std::string>();
  r.initial = j.at("initial").get<std::string>();
  r.mutated = j.at("mutated").get<std::string>();
  r.policy_init = policy_from_json(j.at("policy_init"));
  r.policy_m = policy_from_json(j.at("policy_m"));
  r.repo_id = j.at("repo_id").get<std::string>();
  r.module_path = j.at("module_path").get<std::string>();
  return r;
}

namespace {

// Reads the direct .tf files of one directory; nullopt when there are none.
std::optional<std::string> module_text(const fs::path& dir, IngestLog& log) {
  std::vector<std::pair<std::string, std::string>> files;
  std::error_code ec;
  std::vector<fs::path> tf_files;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    std::error_code type_ec;
    if (it->is_regular_file(type_ec) && it->path().extension() == ".tf") {
      tf_files.push_back(it->path());
    }
  }
  std::sort(tf_files.begin(), tf_files.end());
  for (const auto& f : tf_files) {
    try {
      files.emplace_back(f.filename().string(), util::read_text_file(f));
    } catch (const std::exception&) {
      ++log.unreadable_files;
    }
  }
  if (files.empty()) return std::nullopt;
  return hcl::concat_module(files);
}

}  // namespace

std::vector<ModuleEntry> ingest(const fs::path& tree, IngestLog* log) {
  IngestLog local;
  IngestLog& counters = log ? *log : local;

  std::vector<fs::path> dirs;
  std::error_code ec;
  for (fs::recursive_directory_iterator
           it(tree, fs::directory_options::skip_permission_denied, ec),
       end;
       !ec && it != end; it.increment(ec)) {
    std::error_code type_ec;
    if (it->is_directory(type_ec)) dirs.push_back(it->path());
  }
  std::sort(dirs.begin(), dirs.end());

  std::vector<ModuleEntry> out;
  for (const auto& dir : dirs) {
    auto text = module_text(dir, counters);
    if (!text) continue;
    auto rel = fs::relative(dir, tree);
    auto repo = rel.begin()->string();
    auto module_rel = fs::relative(dir, tree / repo).string();
    out.push_back({repo, module_rel.empty() ? "." : module_rel, std::move(*text)});
    ++counters.modules;
  }
  return out;
}

std::vector<ModuleEntry> ingest_manifest(const fs::path& manifest, IngestLog* log) {
  IngestLog local;
  IngestLog& counters = log ? *log : local;

  std::vector<ModuleEntry> out;
  for (const auto& row : util::read_jsonl(manifest)) {
    auto repo = row.at("repo_id").get<std::string>();
    auto path = row.at("path").get<std::string>();
    fs::path dir(path);
    if (dir.is_relative()) dir = manifest.parent_path() / dir;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      ++counters.unreadable_files;
      continue;
    }
    auto text = module_text(dir, counters);
    if (!text) continue;
    out.push_back({std::move(repo), path, std::move(*text)});
    ++counters.modules;
  }
  return out;
}

const std::set<std::string>& default_provider_allowlist() {
  return verify::implicit_provider_allowlist();
}

bool filter_providers(const hcl::Configuration& config, const std::set<std::string>& allowlist) {
  for (const auto& block : config.blocks) {
    if (block.kind == hcl::BlockKind::Provider) {
      if (block.labels.empty() || !allowlist.count(block.labels[0])) return false;
    } else if (block.kind == hcl::BlockKind::Resource || block.kind == hcl::BlockKind::Data) {
      if (block.labels.empty()) return false;
      const auto& type = block.labels[0];
      auto prefix = type.substr(0, type.find('_'));
      if (!allowlist.count(prefix)) return false;
    }
  }
  return true;
}

std::vector<hcl::Configuration> dedup(const std::vector<hcl::Configuration>& items) {
  std::vector<hcl::Configuration> out;
  std::set<std::string> seen;
  for (const auto& config : items) {
    auto hash = config.canonical_hash.empty() ? util::sha256_hex(hcl::canonicalize(config))
                                              : config.canonical_hash;
    if (seen.insert(hash).second) out.push_back(config);
  }
  return out;
}

SplitResult split_records(const std::vector<std::pair<std::string, std::string>>& repo_modules,
                          const SplitSpec& spec) {
  std::map<std::string, std::set<std::string>> distinct_modules;
  std::map<std::string, std::size_t> records_per_repo;
  for (const auto& [repo, module] : repo_modules) {
    distinct_modules[repo].insert(module);
    ++records_per_repo[repo];
  }

  std::vector<std::string> singles;
  for (const auto& [repo, modules] : distinct_modules) {
    if (modules.size() == 1) singles.push_back(repo);
  }

  std::size_t available = 0;
  for (const auto& repo : singles) available += records_per_repo[repo];
  if (spec.test_count > available) {
    throw InsufficientSingleModuleRepos(spec.test_count, available);
  }

  // Hand-rolled shuffle: identical draws on every platform for a given seed.
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = singles.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(singles[i - 1], singles[j]);
  }

  std::set<std::string> test_repos;
  std::size_t filled = 0;
  for (const auto& repo : singles) {
    std::size_t n = records_per_repo[repo];
    if (filled + n <= spec.test_count) {
      test_repos.insert(repo);
      filled += n;
    }
  }

  SplitResult result;
  for (std::size_t i = 0; i < repo_modules.size(); ++i) {
    if (test_repos.count(repo_modules[i].first)) {
      result.test_indices.push_back(i);
    } else {
      result.train_indices.push_back(i);
    }
  }
  return result;
}

}  // namespace iacforge::curate
