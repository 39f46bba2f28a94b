#include "iacforge/hcl/stats.hpp"

#include <sstream>

namespace iacforge::hcl {

StatRow config_stats(const Configuration& config, std::string_view prompt) {
  StatRow row;
  for (const auto& b : config.blocks) {
    if (b.kind == BlockKind::Provider) ++row.providers;
    if (b.kind == BlockKind::Resource) ++row.resources;
  }

  std::istringstream lines{config.source_text};
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) ++row.loc;
  }

  std::istringstream words{std::string(prompt)};
  std::string word;
  while (words >> word) ++row.prompt_words;
  return row;
}

}  // namespace iacforge::hcl
