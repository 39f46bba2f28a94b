#pragma once

#include <string_view>

#include "iacforge/hcl/ast.hpp"

namespace iacforge::hcl {

struct StatRow {
  int providers = 0;     // top-level provider blocks
  int resources = 0;     // top-level resource blocks
  int loc = 0;           // non-blank source lines
  int prompt_words = 0;  // whitespace-separated tokens in the prompt
};

StatRow config_stats(const Configuration& config, std::string_view prompt);

}  // namespace iacforge::hcl
