#include <algorithm>

#include "iacforge/curate/curate.hpp"
#include "iacforge/hcl/parser.hpp"
#include "iacforge/hcl/stats.hpp"

namespace iacforge::curate {

namespace {

MetricSummary summarize(std::vector<std::size_t> values) {
  std::sort(values.begin(), values.end());
  MetricSummary m;
  m.min = values.front();
  m.max = values.back();
  m.median = values[(values.size() - 1) / 2];  // lower-middle for even counts
  return m;
}

nlohmann::json metric_json(const MetricSummary& m) {
  return nlohmann::json{{"min", m.min}, {"median", m.median}, {"max", m.max}};
}

struct RawRows {
  std::vector<std::size_t> providers, resources, loc, prompt_words;
  std::size_t with_policy = 0;
  std::size_t count = 0;
};

void add_row(RawRows& rows, const std::string& config_text, const std::string& prompt,
             const policy::Policy& policy) {
  auto stat = hcl::config_stats(hcl::parse_config(config_text), prompt);
  rows.providers.push_back(static_cast<std::size_t>(stat.providers));
  rows.resources.push_back(static_cast<std::size_t>(stat.resources));
  rows.loc.push_back(static_cast<std::size_t>(stat.loc));
  rows.prompt_words.push_back(static_cast<std::size_t>(stat.prompt_words));
  if (!policy.rules.empty() || policy.is_external()) ++rows.with_policy;
  ++rows.count;
}

std::optional<StatSummary> finish(const RawRows& rows) {
  if (rows.count == 0) return std::nullopt;
  StatSummary s;
  s.count = rows.count;
  s.providers = summarize(rows.providers);
  s.resources = summarize(rows.resources);
  s.loc = summarize(rows.loc);
  s.prompt_words = summarize(rows.prompt_words);
  s.pct_with_policy =
      100.0 * static_cast<double>(rows.with_policy) / static_cast<double>(rows.count);
  return s;
}

}  // namespace

nlohmann::json StatSummary::to_json() const {
  return nlohmann::json{
      {"count", count},
      {"providers", metric_json(providers)},
      {"resources", metric_json(resources)},
      {"loc", metric_json(loc)},
      {"prompt_words", metric_json(prompt_words)},
      {"pct_with_policy", pct_with_policy},
  };
}

std::optional<StatSummary> gen_split_stats(const std::vector<GenRecord>& records) {
  RawRows rows;
  for (const auto& r : records) add_row(rows, r.target, r.prompt_nl, r.policy);
  return finish(rows);
}

std::optional<StatSummary> mutn_split_stats(const std::vector<MutnRecord>& records) {
  RawRows rows;
  for (const auto& r : records) add_row(rows, r.mutated, r.prompt_m, r.policy_m);
  return finish(rows);
}

nlohmann::json dataset_stats(const std::vector<GenRecord>& gen_train,
                             const std::vector<GenRecord>& gen_test,
                             const std::vector<MutnRecord>& mutn_train,
                             const std::vector<MutnRecord>& mutn_test) {
  auto pack = [](const std::optional<StatSummary>& s) {
    return s ? s->to_json() : nlohmann::json(nullptr);
  };
  return nlohmann::json{
      {"tfgen_train", pack(gen_split_stats(gen_train))},
      {"tfgen_test", pack(gen_split_stats(gen_test))},
      {"tfmutn_train", pack(mutn_split_stats(mutn_train))},
      {"tfmutn_test", pack(mutn_split_stats(mutn_test))},
  };
}

}  // namespace iacforge::curate
