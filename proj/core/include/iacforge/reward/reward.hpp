#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "iacforge/policy/policy.hpp"
#include "iacforge/verify/verify.hpp"

namespace iacforge::reward {

enum class Tier { None, Compilable, Deployable };

std::string_view to_string(Tier tier);

// Tiered score for one candidate against one policy:
//   deployable       -> 1 + passed/total   (in [1, 2])
//   compilable only  -> 0.5
//   otherwise        -> 0
// The image is exactly {0} u {0.5} u [1, 2].
struct RewardBreakdown {
  double reward = 0.0;
  Tier tier = Tier::None;
  int rules_passed = 0;
  int rules_total = 0;
  verify::VerdictReport fv1;
  std::optional<verify::VerdictReport> fv2;
  std::optional<policy::RuleResults> fv3;

  nlohmann::json to_json() const;
};

// Throws policy::EmptyPolicy before any verification work.
RewardBreakdown compute_reward(const hcl::Configuration& config, const policy::Policy& policy);

// Text-level wrapper: an unparseable candidate lands in the zero tier with a
// PARSE diagnostic rather than raising.
RewardBreakdown compute_reward_text(std::string_view config_text, const policy::Policy& policy);

struct EmptyGroup : std::runtime_error {
  EmptyGroup() : std::runtime_error("reward group is empty") {}
};

// Group-relative advantages: baseline is the group mean, advantage is each
// reward minus that mean. Advantages sum to zero (within fp tolerance).
struct GroupAdvantages {
  std::vector<double> rewards;
  double baseline = 0.0;
  std::vector<double> advantages;

  nlohmann::json to_json() const;
};

GroupAdvantages group_advantages(const std::vector<double>& rewards);

}  // namespace iacforge::reward
