#include "iacforge/reward/reward.hpp"

#include "iacforge/hcl/parser.hpp"

namespace iacforge::reward {

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::None: return "NONE";
    case Tier::Compilable: return "COMPILABLE";
    case Tier::Deployable: return "DEPLOYABLE";
  }
  return "NONE";
}

nlohmann::json RewardBreakdown::to_json() const {
  nlohmann::json j{
      {"reward", reward},
      {"tier", std::string(to_string(tier))},
      {"rules_passed", rules_passed},
      {"rules_total", rules_total},
      {"fv1", fv1.to_json()},
  };
  if (fv2) j["fv2"] = fv2->to_json();
  if (fv3) j["fv3"] = fv3->to_json();
  return j;
}

RewardBreakdown compute_reward(const hcl::Configuration& config, const policy::Policy& policy) {
  if (!policy.is_external() && policy.rules.empty()) throw policy::EmptyPolicy();

  RewardBreakdown out;
  out.rules_total = policy.is_external() ? 0 : static_cast<int>(policy.rules.size());

  out.fv1 = verify::validate(config);
  if (!out.fv1.passed) {
    out.tier = Tier::None;
    out.reward = 0.0;
    return out;
  }

  auto [fv2, doc] = verify::plan(config);
  out.fv2 = fv2;
  if (!fv2.passed || !doc) {
    out.tier = Tier::Compilable;
    out.reward = 0.5;
    return out;
  }

  auto results = policy::evaluate_policy(policy, *doc);
  out.fv3 = results;
  out.rules_passed = results.passed_count;
  out.rules_total = results.total_count;
  out.tier = Tier::Deployable;
  out.reward = 1.0 + static_cast<double>(results.passed_count) /
                         static_cast<double>(results.total_count);
  return out;
}

RewardBreakdown compute_reward_text(std::string_view config_text, const policy::Policy& policy) {
  if (!policy.is_external() && policy.rules.empty()) throw policy::EmptyPolicy();
  try {
    return compute_reward(hcl::parse_config(config_text), policy);
  } catch (const hcl::ParseError& e) {
    RewardBreakdown out;
    out.tier = Tier::None;
    out.reward = 0.0;
    out.rules_total = policy.is_external() ? 0 : static_cast<int>(policy.rules.size());
    out.fv1.stage = verify::Stage::FV1;
    out.fv1.passed = false;
    verify::Diagnostic d;
    d.stage = verify::Stage::FV1;
    d.code = "PARSE";
    d.message = e.what();
    d.location = verify::SourceLocation{"", e.line, e.col};
    out.fv1.diagnostics.push_back(std::move(d));
    return out;
  }
}

nlohmann::json GroupAdvantages::to_json() const {
  return nlohmann::json{
      {"rewards", rewards}, {"baseline", baseline}, {"advantages", advantages}};
}

GroupAdvantages group_advantages(const std::vector<double>& rewards) {
  if (rewards.empty()) throw EmptyGroup();
  GroupAdvantages out;
  out.rewards = rewards;
  double sum = 0.0;
  for (double r : rewards) sum += r;
  out.baseline = sum / static_cast<double>(rewards.size());
  out.advantages.reserve(rewards.size());
  for (double r : rewards) out.advantages.push_back(r - out.baseline);
  return out;
}

}  // namespace iacforge::reward
