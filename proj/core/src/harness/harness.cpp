#include "iacforge/harness/harness.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "iacforge/curate/curate.hpp"
#include "iacforge/harness/checks.hpp"
#include "iacforge/hcl/parser.hpp"
#include "iacforge/reward/reward.hpp"
#include "iacforge/util/jsonl.hpp"
#include "iacforge/util/subprocess.hpp"
#include "iacforge/util/worker_pool.hpp"

namespace iacforge::harness {

namespace fs = std::filesystem;

namespace {

std::string format_pct(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

// Scratch module directory for external scanners; removed by the caller.
fs::path write_temp_module(const std::string& text) {
  static std::mt19937_64 rng{std::random_device{}()};
  auto dir = fs::temp_directory_path() /
             ("iacforge-scan-" + std::to_string(rng()));
  fs::create_directories(dir);
  std::ofstream out(dir / "main.tf", std::ios::binary);
  out << text;
  return dir;
}

bool external_lint(const std::string& text, const std::string& binary) {
  auto dir = write_temp_module(text);
  util::RunOptions opts;
  opts.workdir = dir.string();
  opts.timeout = std::chrono::milliseconds(60000);
  auto result = util::run_command({binary}, opts);
  std::error_code ec;
  fs::remove_all(dir, ec);
  return result.ok();
}

std::optional<double> external_security(const std::string& text, const std::string& binary) {
  auto dir = write_temp_module(text);
  util::RunOptions opts;
  opts.timeout = std::chrono::milliseconds(120000);
  auto result = util::run_command(
      {binary, "-d", dir.string(), "--output", "json", "--quiet", "--compact"}, opts);
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (result.timed_out) throw std::runtime_error("security scanner timed out");

  std::size_t passed = 0, failed = 0;
  auto tally = [&](const nlohmann::json& block) {
    if (!block.is_object() || !block.contains("results")) return;
    const auto& r = block["results"];
    passed += r.value("passed_checks", nlohmann::json::array()).size();
    failed += r.value("failed_checks", nlohmann::json::array()).size();
  };
  try {
    auto j = nlohmann::json::parse(result.out);
    if (j.is_array()) {
      for (const auto& block : j) tally(block);
    } else {
      tally(j);
    }
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("security scanner produced unparseable output");
  }
  if (passed + failed == 0) return std::nullopt;
  return 100.0 * static_cast<double>(passed) / static_cast<double>(passed + failed);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

nlohmann::json MetricVector::to_json() const {
  nlohmann::json j{{"compilable", compilable},
                   {"deployable", deployable},
                   {"correct", correct},
                   {"lint_pass", lint_pass}};
  j["security_compliance"] =
      security_compliance ? nlohmann::json(*security_compliance) : nlohmann::json(nullptr);
  return j;
}

IdMismatch::IdMismatch(std::vector<std::string> missing_in, std::vector<std::string> extra_in)
    : std::runtime_error("candidate ids do not match dataset ids (" +
                         std::to_string(missing_in.size()) + " missing, " +
                         std::to_string(extra_in.size()) + " extra)"),
      missing(std::move(missing_in)),
      extra(std::move(extra_in)) {}

MetricVector evaluate_instance(const std::string& candidate, const policy::Policy& policy) {
  auto breakdown = reward::compute_reward_text(candidate, policy);
  MetricVector mv;
  mv.compilable = breakdown.fv1.passed;
  mv.deployable = breakdown.fv2 && breakdown.fv2->passed;
  mv.correct = mv.deployable && breakdown.fv3 && breakdown.fv3->all_passed();

  hcl::Configuration config;
  try {
    config = hcl::parse_config(candidate);
  } catch (const hcl::ParseError&) {
    mv.security_compliance = 0.0;
    return mv;
  }

  const char* tflint = std::getenv("IACFORGE_TFLINT_BIN");
  if (tflint && *tflint) {
    mv.lint_pass = external_lint(candidate, tflint);
  } else {
    mv.lint_pass = run_pack(lint_pack(), config).findings.empty();
  }

  const char* checkov = std::getenv("IACFORGE_CHECKOV_BIN");
  if (checkov && *checkov) {
    mv.security_compliance = external_security(candidate, checkov);
  } else {
    auto sec = run_pack(security_pack(), config);
    if (sec.applicable > 0) {
      mv.security_compliance =
          100.0 * static_cast<double>(sec.passed) / static_cast<double>(sec.applicable);
    }
  }
  return mv;
}

Report aggregate(const std::vector<MetricVector>& vectors) {
  if (vectors.empty()) throw EmptyDataset();
  Report report;
  report.instances = vectors.size();
  std::size_t compilable = 0, deployable = 0, correct = 0, lint = 0;
  double security_sum = 0.0;
  std::size_t security_n = 0;
  for (const auto& v : vectors) {
    compilable += v.compilable;
    deployable += v.deployable;
    correct += v.correct;
    lint += v.lint_pass;
    if (v.security_compliance) {
      security_sum += *v.security_compliance;
      ++security_n;
    }
  }
  auto pct = [&](std::size_t n) {
    return 100.0 * static_cast<double>(n) / static_cast<double>(vectors.size());
  };
  report.compilability = pct(compilable);
  report.deployability = pct(deployable);
  report.correctness = pct(correct);
  report.lint_pass_rate = pct(lint);
  if (security_n > 0) report.security_compliance = security_sum / security_n;
  return report;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j{{"instances", instances},
                   {"compilability", compilability},
                   {"deployability", deployability},
                   {"correctness", correctness},
                   {"lint_pass_rate", lint_pass_rate}};
  j["security_compliance"] =
      security_compliance ? nlohmann::json(*security_compliance) : nlohmann::json(nullptr);
  return j;
}

std::string Report::to_text() const {
  std::ostringstream out;
  auto row = [&](const char* name, const std::string& value) {
    out << name;
    for (std::size_t i = std::strlen(name); i < 22; ++i) out << ' ';
    out << value << "\n";
  };
  row("Instances", std::to_string(instances));
  row("Compilability", format_pct(compilability) + "%");
  row("Deployability", format_pct(deployability) + "%");
  row("Correctness", format_pct(correctness) + "%");
  row("Linter Pass Rate", format_pct(lint_pass_rate) + "%");
  row("Security Compliance",
      security_compliance ? format_pct(*security_compliance) + "%" : std::string("n/a"));
  return out.str();
}

BenchmarkResult run_benchmark(const fs::path& dataset_path, const fs::path& candidates_path,
                              const BenchmarkOptions& options) {
  struct Instance {
    std::string id;
    policy::Policy policy;
    std::string candidate;
  };
  std::vector<Instance> instances;
  std::set<std::string> dataset_ids;
  for (const auto& row : util::read_jsonl(dataset_path)) {
    Instance inst;
    inst.id = row.at("id").get<std::string>();
    inst.policy = curate::policy_from_json(row.at("policy"));
    dataset_ids.insert(inst.id);
    instances.push_back(std::move(inst));
  }

  std::map<std::string, std::string> candidates;
  std::vector<std::string> extra;
  for (const auto& row : util::read_jsonl(candidates_path)) {
    auto id = row.at("id").get<std::string>();
    if (!dataset_ids.count(id) || candidates.count(id)) {
      extra.push_back(id);
      continue;
    }
    candidates[id] = row.at("config").get<std::string>();
  }
  std::vector<std::string> missing;
  for (const auto& inst : instances) {
    if (!candidates.count(inst.id)) missing.push_back(inst.id);
  }
  if (!missing.empty() || !extra.empty()) {
    throw IdMismatch(std::move(missing), std::move(extra));
  }
  for (auto& inst : instances) inst.candidate = candidates.at(inst.id);

  std::vector<MetricVector> vectors(instances.size());
  if (options.workers > 1) {
    util::WorkerPool pool(static_cast<std::size_t>(options.workers));
    util::parallel_for(pool, instances.size(), [&](std::size_t i) {
      vectors[i] = evaluate_instance(instances[i].candidate, instances[i].policy);
    });
  } else {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      vectors[i] = evaluate_instance(instances[i].candidate, instances[i].policy);
    }
  }

  BenchmarkResult result;
  result.report = aggregate(vectors);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    result.per_instance.emplace_back(instances[i].id, vectors[i]);
  }

  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    std::ofstream json_out(options.out_dir / "report.json", std::ios::binary);
    json_out << result.report.to_json().dump(2) << "\n";
    std::ofstream csv(options.out_dir / "per_instance.csv", std::ios::binary);
    csv << "id,compilable,deployable,correct,lint,security\n";
    for (const auto& [id, v] : result.per_instance) {
      csv << csv_escape(id) << ',' << (v.compilable ? 1 : 0) << ',' << (v.deployable ? 1 : 0)
          << ',' << (v.correct ? 1 : 0) << ',' << (v.lint_pass ? 1 : 0) << ',';
      if (v.security_compliance) csv << format_pct(*v.security_compliance);
      csv << "\n";
    }
  }
  return result;
}

}  // namespace iacforge::harness
