#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "iacforge/policy/policy.hpp"

namespace iacforge::harness {

// Pass@1 metrics for one candidate. The booleans form a hierarchy: correct
// implies deployable implies compilable.
struct MetricVector {
  bool compilable = false;
  bool deployable = false;
  bool correct = false;
  bool lint_pass = false;
  // 100 * passed/applicable security checks; absent when none applied.
  std::optional<double> security_compliance;

  nlohmann::json to_json() const;
};

struct EmptyDataset : std::runtime_error {
  EmptyDataset() : std::runtime_error("no metric vectors to aggregate") {}
};

struct IdMismatch : std::runtime_error {
  std::vector<std::string> missing;  // dataset ids with no candidate
  std::vector<std::string> extra;    // candidate ids not in the dataset

  IdMismatch(std::vector<std::string> missing, std::vector<std::string> extra);
};

// Scores one candidate against one policy. An unparseable candidate scores
// all booleans false and security 0. Throws policy::EmptyPolicy.
// Env IACFORGE_TFLINT_BIN / IACFORGE_CHECKOV_BIN switch the lint and security
// columns to the named external scanners.
MetricVector evaluate_instance(const std::string& candidate, const policy::Policy& policy);

struct Report {
  std::size_t instances = 0;
  double compilability = 0.0;   // all four as percentages of instances
  double deployability = 0.0;
  double correctness = 0.0;
  double lint_pass_rate = 0.0;
  // Mean of the per-instance percentages that were present.
  std::optional<double> security_compliance;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

// Throws EmptyDataset on an empty input.
Report aggregate(const std::vector<MetricVector>& vectors);

struct BenchmarkOptions {
  std::filesystem::path out_dir;  // report.json and per_instance.csv land here
  int workers = 1;
};

struct BenchmarkResult {
  Report report;
  // Dataset order, one row per instance.
  std::vector<std::pair<std::string, MetricVector>> per_instance;
};

// Scores a candidates file ({id, config} per line) against a dataset file
// (records with id and policy). Candidate ids must match dataset ids one to
// one; otherwise IdMismatch lists both directions.
BenchmarkResult run_benchmark(const std::filesystem::path& dataset_path,
                              const std::filesystem::path& candidates_path,
                              const BenchmarkOptions& options = {});

}  // namespace iacforge::harness
