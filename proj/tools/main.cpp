#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iacforge/analysis/analysis.hpp"
#include "iacforge/curate/curate.hpp"
#include "iacforge/curate/pipeline.hpp"
#include "iacforge/harness/harness.hpp"
#include "iacforge/hcl/parser.hpp"
#include "iacforge/policy/external.hpp"
#include "iacforge/policy/policy.hpp"
#include "iacforge/repair/llm_client.hpp"
#include "iacforge/repair/repair.hpp"
#include "iacforge/reward/reward.hpp"
#include "iacforge/service/service.hpp"
#include "iacforge/util/jsonl.hpp"
#include "iacforge/util/subprocess.hpp"
#include "iacforge/util/tool_config.hpp"
#include "iacforge/verify/external.hpp"
#include "iacforge/verify/verify.hpp"

namespace {

using namespace iacforge;

constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct CommonFlags {
  std::optional<std::string> config_file;
  bool json = false;
  std::string backend;
  int workers = -1;
  int timeout_secs = -1;
  int max_turns = -1;
  std::uint64_t seed = 0;
  int port = -1;
};

util::ToolConfig resolve_config(const CommonFlags& flags) {
  std::optional<std::filesystem::path> path;
  if (flags.config_file) path = *flags.config_file;
  auto cfg = util::load_tool_config(path);
  if (!flags.backend.empty()) cfg.backend = flags.backend;
  if (flags.workers >= 0) cfg.workers = flags.workers;
  if (flags.timeout_secs >= 0) cfg.timeout_secs = flags.timeout_secs;
  if (flags.max_turns >= 0) cfg.max_turns = flags.max_turns;
  if (flags.port >= 0) cfg.port = flags.port;
  return cfg;
}

verify::ExternalBackend external_backend(const util::ToolConfig& cfg) {
  verify::ExternalBackend backend;
  backend.terraform_bin = cfg.terraform_bin.empty() ? "terraform" : cfg.terraform_bin;
  backend.plan_timeout = std::chrono::seconds(cfg.timeout_secs);
  return backend;
}

void print_report(const verify::VerdictReport& report, bool json) {
  if (json) {
    std::cout << report.to_json().dump() << "\n";
  } else if (report.passed) {
    std::cout << "pass (" << verify::to_string(report.stage) << ", " << report.backend
              << " backend)\n";
  } else {
    std::cout << report.certificate();
  }
}

// LLM selection shared by repair and curate: a recorded-session replay file
// wins, otherwise an HTTP endpoint, optionally tee'd to a new recording.
struct LlmFlags {
  std::string endpoint;
  std::string model;
  std::string replay_log;
  std::string record_log;
};

struct LlmHandle {
  std::unique_ptr<repair::LlmClient> inner;
  std::unique_ptr<repair::LlmClient> wrapper;

  repair::LlmClient& use() { return wrapper ? *wrapper : *inner; }
};

LlmHandle make_llm(const LlmFlags& flags, const util::ToolConfig& cfg) {
  LlmHandle handle;
  if (!flags.replay_log.empty()) {
    handle.inner = std::make_unique<repair::ReplayLogClient>(flags.replay_log);
  } else {
    auto endpoint = flags.endpoint.empty() ? cfg.llm_endpoint : flags.endpoint;
    if (endpoint.empty()) {
      throw util::ConfigError(
          "no language model configured; pass --llm-endpoint or --replay-log");
    }
    auto model = flags.model.empty() ? cfg.llm_model : flags.model;
    handle.inner = std::make_unique<repair::HttpChatClient>(endpoint, model);
  }
  if (!flags.record_log.empty()) {
    handle.wrapper =
        std::make_unique<repair::RecordingClient>(*handle.inner, flags.record_log);
  }
  return handle;
}

void add_llm_flags(CLI::App* cmd, LlmFlags& flags) {
  cmd->add_option("--llm-endpoint", flags.endpoint, "chat completion endpoint URL");
  cmd->add_option("--model", flags.model, "model name sent with each request");
  cmd->add_option("--replay-log", flags.replay_log,
                  "JSONL of recorded responses replayed instead of live calls");
  cmd->add_option("--record", flags.record_log, "record prompt/response pairs to this JSONL");
}

policy::Policy load_policy(const std::filesystem::path& path) {
  auto text = read_file(path);
  if (path.extension() == ".rego") {
    return policy::policy_from_rego(path.stem().string(), text);
  }
  return policy::parse_policy_json(text);
}

int run_validate(const std::string& file, const CommonFlags& common) {
  auto cfg = resolve_config(common);
  auto text = read_file(file);
  auto report = cfg.backend == "external"
                    ? verify::external_validate(text, external_backend(cfg))
                    : verify::validate_text(text);
  print_report(report, common.json);
  return report.passed ? 0 : kExitVerificationFailure;
}

int run_plan(const std::string& file, const CommonFlags& common) {
  auto cfg = resolve_config(common);
  auto text = read_file(file);
  if (cfg.backend == "external") {
    auto report = verify::external_plan(text, external_backend(cfg));
    print_report(report, common.json);
    return report.passed ? 0 : kExitVerificationFailure;
  }
  auto [report, doc] = verify::plan_text(text);
  if (common.json) {
    auto j = report.to_json();
    if (doc) j["plan"] = doc->to_json();
    std::cout << j.dump() << "\n";
  } else {
    print_report(report, false);
    if (doc) std::cout << doc->to_canonical_json() << "\n";
  }
  return report.passed ? 0 : kExitVerificationFailure;
}

int run_policy_eval(const std::string& tf_file, const std::string& policy_file,
                    const CommonFlags& common) {
  auto cfg = resolve_config(common);
  auto [report, doc] = verify::plan_text(read_file(tf_file));
  if (!doc) {
    std::cerr << report.certificate();
    return kExitVerificationFailure;
  }
  auto policy = load_policy(policy_file);
  policy::RuleResults results;
  if (policy.is_external()) {
    policy::OpaBackend backend{cfg.opa_bin.empty() ? "opa" : cfg.opa_bin};
    results = policy::external_policy_eval(policy, *doc, backend);
  } else {
    results = policy::evaluate_policy(policy, *doc);
  }
  if (common.json) {
    std::cout << results.to_json().dump() << "\n";
  } else {
    std::cout << results.certificate();
  }
  return results.all_passed() ? 0 : kExitVerificationFailure;
}

int run_reward(const std::string& tf_file, const std::string& policy_file) {
  auto breakdown =
      reward::compute_reward_text(read_file(tf_file), load_policy(policy_file));
  std::cout << breakdown.to_json().dump() << "\n";
  return 0;
}

int run_repair(const std::string& tf_file, const std::string& stage_name,
               const std::string& out_file, const LlmFlags& llm_flags,
               const CommonFlags& common) {
  auto cfg = resolve_config(common);
  auto text = read_file(tf_file);

  repair::LoopStage stage;
  repair::Verifier verifier;
  if (stage_name == "FV1") {
    stage = repair::LoopStage::FV1;
    verifier = cfg.backend == "external"
                   ? repair::Verifier([&cfg](const std::string& t) {
                       auto report = verify::external_validate(t, external_backend(cfg));
                       return repair::VerifierResult{report.passed, report.certificate(),
                                                     report.to_json()};
                     })
                   : repair::make_fv1_verifier();
  } else if (stage_name == "FV2") {
    stage = repair::LoopStage::FV2;
    verifier = cfg.backend == "external"
                   ? repair::Verifier([&cfg](const std::string& t) {
                       auto report = verify::external_plan(t, external_backend(cfg));
                       return repair::VerifierResult{report.passed, report.certificate(),
                                                     report.to_json()};
                     })
                   : repair::make_fv2_verifier();
  } else {
    throw util::ConfigError("--stage must be FV1 or FV2");
  }

  auto llm = make_llm(llm_flags, cfg);
  auto options = repair::default_options(stage);
  options.max_turns = cfg.max_turns;
  auto transcript = repair::run_repair_loop(text, verifier, llm.use(), options);

  if (!out_file.empty()) write_file(out_file, transcript.final_artifact);
  if (common.json) {
    std::cout << transcript.to_json().dump() << "\n";
  } else {
    std::cout << to_string(transcript.outcome) << " after " << transcript.turns_used
              << " turn(s)\n";
    if (out_file.empty() && transcript.outcome != repair::Outcome::PassedUnchanged) {
      std::cout << transcript.final_artifact;
    }
  }
  bool fixed = transcript.outcome == repair::Outcome::Repaired ||
               transcript.outcome == repair::Outcome::PassedUnchanged;
  return fixed ? 0 : kExitVerificationFailure;
}

struct CurateFlags {
  std::string modules_dir;
  std::string manifest;
  std::string out;
  std::string dropped;
  std::string checkpoint;
  std::string level = "mid";
  LlmFlags llm;
};

void add_curate_flags(CLI::App* cmd, CurateFlags& flags) {
  cmd->add_option("--modules", flags.modules_dir, "root of a repo/module directory tree");
  cmd->add_option("--manifest", flags.manifest, "JSONL manifest {repo_id, path}");
  cmd->add_option("--out", flags.out, "output dataset JSONL")->required();
  cmd->add_option("--dropped", flags.dropped, "JSONL drop log");
  cmd->add_option("--checkpoint", flags.checkpoint, "resumable progress log");
  cmd->add_option("--level", flags.level, "prompt detail: high, mid or low");
  add_llm_flags(cmd, flags.llm);
}

int run_curate(const CurateFlags& flags, bool mutations, const CommonFlags& common) {
  auto cfg = resolve_config(common);
  if (flags.modules_dir.empty() == flags.manifest.empty()) {
    throw util::ConfigError("pass exactly one of --modules or --manifest");
  }

  curate::IngestLog log;
  auto modules = flags.manifest.empty() ? curate::ingest(flags.modules_dir, &log)
                                        : curate::ingest_manifest(flags.manifest, &log);

  curate::PipelineOptions options;
  options.max_turns = cfg.max_turns;
  options.prompt_level = repair::prompt_level_from_string(flags.level);
  if (!flags.checkpoint.empty()) options.checkpoint_path = flags.checkpoint;
  if (!flags.dropped.empty()) options.dropped_path = flags.dropped;

  auto llm = make_llm(flags.llm, cfg);
  auto seed = curate::build_seed_corpus(modules, llm.use(), options);

  std::size_t emitted = 0;
  std::size_t dropped = seed.dropped.size();
  std::ofstream out(flags.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + flags.out);
  if (mutations) {
    auto result = curate::curate_mutn(seed.triplets, llm.use(), options);
    for (const auto& r : result.records) out << r.to_json().dump() << "\n";
    emitted = result.records.size();
    dropped += result.dropped.size();
  } else {
    auto result = curate::curate_gen(seed.triplets, llm.use(), options);
    for (const auto& r : result.records) out << r.to_json().dump() << "\n";
    emitted = result.records.size();
    dropped += result.dropped.size();
  }

  nlohmann::json summary{{"records", emitted},
                         {"dropped", dropped},
                         {"unreadable_files", log.unreadable_files},
                         {"stages", seed.counts.to_json()}};
  if (common.json) {
    std::cout << summary.dump() << "\n";
  } else {
    std::cout << emitted << " record(s) written to " << flags.out << ", " << dropped
              << " item(s) dropped\n";
  }
  return 0;
}

int run_split(const std::string& records_file, std::uint64_t seed, std::size_t test_count,
              const std::string& out_train, const std::string& out_test,
              const std::string& stats_out, const CommonFlags& common) {
  auto rows = util::read_jsonl(records_file);
  std::vector<std::pair<std::string, std::string>> keys;
  keys.reserve(rows.size());
  for (const auto& row : rows) {
    keys.emplace_back(row.at("repo_id").get<std::string>(),
                      row.at("module_path").get<std::string>());
  }
  auto split = curate::split_records(keys, curate::SplitSpec{seed, test_count});

  auto write_rows = [&](const std::string& path, const std::vector<std::size_t>& indices) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (auto i : indices) out << rows[i].dump() << "\n";
  };
  write_rows(out_train, split.train_indices);
  write_rows(out_test, split.test_indices);

  if (!stats_out.empty()) {
    bool mutn = !rows.empty() && rows.front().contains("mutated");
    auto collect_gen = [&](const std::vector<std::size_t>& idx) {
      std::vector<curate::GenRecord> v;
      for (auto i : idx) v.push_back(curate::GenRecord::from_json(rows[i]));
      return v;
    };
    auto collect_mutn = [&](const std::vector<std::size_t>& idx) {
      std::vector<curate::MutnRecord> v;
      for (auto i : idx) v.push_back(curate::MutnRecord::from_json(rows[i]));
      return v;
    };
    nlohmann::json stats;
    if (mutn) {
      stats = curate::dataset_stats({}, {}, collect_mutn(split.train_indices),
                                    collect_mutn(split.test_indices));
    } else {
      stats = curate::dataset_stats(collect_gen(split.train_indices),
                                    collect_gen(split.test_indices), {}, {});
    }
    write_file(stats_out, stats.dump(2) + "\n");
  }

  nlohmann::json summary{{"train", split.train_indices.size()},
                         {"test", split.test_indices.size()}};
  if (common.json) {
    std::cout << summary.dump() << "\n";
  } else {
    std::cout << split.train_indices.size() << " train / " << split.test_indices.size()
              << " test record(s)\n";
  }
  return 0;
}

int run_eval(const std::string& dataset, const std::string& candidates,
             const std::string& out_dir, const CommonFlags& common) {
  auto cfg = resolve_config(common);
  harness::BenchmarkOptions options;
  if (!out_dir.empty()) options.out_dir = out_dir;
  options.workers = cfg.effective_workers();
  auto result = harness::run_benchmark(dataset, candidates, options);
  if (common.json) {
    std::cout << result.report.to_json().dump() << "\n";
  } else {
    std::cout << result.report.to_text();
  }
  return 0;
}

int run_mutation_stats(const std::string& records_file, const std::string& out_file,
                       const std::string& csv_file, std::vector<double> points,
                       const CommonFlags& common) {
  std::vector<std::size_t> distances;
  std::vector<std::string> ids;
  for (const auto& row : util::read_jsonl(records_file)) {
    auto rec = curate::MutnRecord::from_json(row);
    distances.push_back(analysis::levenshtein(rec.initial, rec.mutated));
    ids.push_back(rec.id);
  }
  if (points.empty()) points = {0, 80, 160, 320, 640, 1200, 2400, 4800};
  auto summary = analysis::complexity_distribution(distances, points);
  auto j = summary.to_json();
  if (!out_file.empty()) write_file(out_file, j.dump(2) + "\n");
  if (!csv_file.empty()) {
    std::ofstream csv(csv_file, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + csv_file);
    csv << "id,distance,class\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
      csv << ids[i] << ',' << distances[i] << ','
          << analysis::to_string(analysis::classify_mutation(distances[i])) << "\n";
    }
  }
  if (common.json || out_file.empty()) std::cout << j.dump() << "\n";
  return 0;
}

int run_serve(const std::string& host, const CommonFlags& common) {
  auto cfg = resolve_config(common);
  if (cfg.backend == "external") {
    auto bin = cfg.terraform_bin.empty() ? "terraform" : cfg.terraform_bin;
    if (!util::resolve_binary(bin)) {
      throw util::ConfigError("external backend selected but " + bin + " is not resolvable");
    }
  }
  service::RewardService svc;
  std::cerr << "listening on " << host << ":" << cfg.port << "\n";
  if (!svc.run(host, cfg.port)) {
    throw util::ConfigError("cannot bind " + host + ":" + std::to_string(cfg.port));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verifier-guided toolkit for Terraform-style configurations"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags common;
  app.add_option("--config-file", common.config_file, "settings file (iacforge.toml)");
  app.add_flag("--json", common.json, "machine-readable JSON on stdout");
  app.add_option("--backend", common.backend, "builtin or external")
      ->check(CLI::IsMember({"builtin", "external"}));
  app.add_option("--workers", common.workers, "worker pool size");
  app.add_option("--timeout-secs", common.timeout_secs, "external command timeout");
  app.add_option("--max-turns", common.max_turns, "repair loop turn budget");
  app.add_option("--seed", common.seed, "deterministic shuffle seed");
  app.add_option("--port", common.port, "service port");

  std::string file_arg, policy_arg, stage_arg = "FV2", out_arg;
  LlmFlags repair_llm;
  CurateFlags gen_flags, mutn_flags;
  std::string split_records, split_train, split_test, split_stats;
  std::size_t split_test_count = 0;
  std::string eval_dataset, eval_candidates, eval_out;
  std::string stats_records, stats_out, stats_csv;
  std::vector<double> stats_points;
  std::string serve_host = "0.0.0.0";

  auto* cmd_validate = app.add_subcommand("validate", "syntax and reference checks");
  cmd_validate->add_option("file", file_arg, "configuration file")->required();

  auto* cmd_plan = app.add_subcommand("plan", "deployability simulation");
  cmd_plan->add_option("file", file_arg, "configuration file")->required();

  auto* cmd_policy = app.add_subcommand("policy-eval", "evaluate a policy against a plan");
  cmd_policy->add_option("--tf", file_arg, "configuration file")->required();
  cmd_policy->add_option("--policy", policy_arg, "policy file (.json or .rego)")->required();

  auto* cmd_reward = app.add_subcommand("reward", "tiered score for one candidate");
  cmd_reward->add_option("--config", file_arg, "configuration file")->required();
  cmd_reward->add_option("--policy", policy_arg, "policy file (.json or .rego)")->required();

  auto* cmd_repair = app.add_subcommand("repair", "certificate-guided repair loop");
  cmd_repair->add_option("--config", file_arg, "configuration file")->required();
  cmd_repair->add_option("--stage", stage_arg, "FV1 or FV2");
  cmd_repair->add_option("--out", out_arg, "write the final artifact here");
  add_llm_flags(cmd_repair, repair_llm);

  auto* cmd_curate = app.add_subcommand("curate", "dataset curation");
  cmd_curate->require_subcommand(1);
  auto* cmd_gen = cmd_curate->add_subcommand("gen", "prompt/config/policy records");
  add_curate_flags(cmd_gen, gen_flags);
  auto* cmd_mutn = cmd_curate->add_subcommand("mutn", "mutation quintuplet records");
  add_curate_flags(cmd_mutn, mutn_flags);

  auto* cmd_split = app.add_subcommand("split", "leak-free train/test split");
  cmd_split->add_option("--records", split_records, "dataset JSONL")->required();
  cmd_split->add_option("--test-count", split_test_count, "records in the test split")
      ->required();
  cmd_split->add_option("--out-train", split_train, "train JSONL")->required();
  cmd_split->add_option("--out-test", split_test, "test JSONL")->required();
  cmd_split->add_option("--stats", split_stats, "write split statistics JSON here");

  auto* cmd_eval = app.add_subcommand("eval", "score candidates against a dataset");
  cmd_eval->add_option("--dataset", eval_dataset, "dataset JSONL")->required();
  cmd_eval->add_option("--candidates", eval_candidates, "candidates JSONL {id, config}")
      ->required();
  cmd_eval->add_option("--out-dir", eval_out, "report output directory");

  auto* cmd_stats = app.add_subcommand("mutation-stats", "edit-distance complexity summary");
  cmd_stats->add_option("--records", stats_records, "mutation dataset JSONL")->required();
  cmd_stats->add_option("--out", stats_out, "complexity JSON output");
  cmd_stats->add_option("--csv", stats_csv, "per-record distance CSV");
  cmd_stats->add_option("--points", stats_points, "CDF sample points");

  auto* cmd_serve = app.add_subcommand("serve", "HTTP verification and reward service");
  cmd_serve->add_option("--host", serve_host, "bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cmd_validate) return run_validate(file_arg, common);
    if (*cmd_plan) return run_plan(file_arg, common);
    if (*cmd_policy) return run_policy_eval(file_arg, policy_arg, common);
    if (*cmd_reward) return run_reward(file_arg, policy_arg);
    if (*cmd_repair) return run_repair(file_arg, stage_arg, out_arg, repair_llm, common);
    if (*cmd_gen) return run_curate(gen_flags, false, common);
    if (*cmd_mutn) return run_curate(mutn_flags, true, common);
    if (*cmd_split) {
      return run_split(split_records, common.seed, split_test_count, split_train, split_test,
                       split_stats, common);
    }
    if (*cmd_eval) return run_eval(eval_dataset, eval_candidates, eval_out, common);
    if (*cmd_stats) {
      return run_mutation_stats(stats_records, stats_out, stats_csv, stats_points, common);
    }
    if (*cmd_serve) return run_serve(serve_host, common);
  } catch (const repair::LlmUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
