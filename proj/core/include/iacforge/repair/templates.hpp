#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iacforge::repair {

struct MissingSlot : std::runtime_error {
  std::string slot;
  explicit MissingSlot(std::string name)
      : std::runtime_error("template slot '" + name + "' is unfilled"), slot(std::move(name)) {}
};

struct UnknownTemplate : std::runtime_error {
  explicit UnknownTemplate(const std::string& id)
      : std::runtime_error("no builtin template named '" + id + "'") {}
};

struct PromptTemplate {
  std::string id;
  std::string body;
};

// Substitutes {slot_name} markers in a single pass; substituted values are
// never re-scanned, so configuration text with ${...} or map literals is safe
// to inject. Any marker without a matching map entry raises MissingSlot.
std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& slots);

// Returns the packaged template for one of the known ids:
//   repair-fv1, repair-fv2, repair-fv3, gen-fewshot, mutn-fewshot,
//   prompt-gen, policy-gen, clone-gen, mutation-gen, judge-align
PromptTemplate builtin_template(std::string_view id);

const std::vector<std::string>& builtin_template_ids();

enum class PromptLevel { High, Mid, Low };

std::string_view to_string(PromptLevel level);
PromptLevel prompt_level_from_string(std::string_view s);

// Fills the {level_instruction} slot of the prompt-gen template.
std::string level_instruction(PromptLevel level);

// Small known-good configurations used to fill the few-shot example slots of
// the repair templates when the caller has no curated examples at hand.
const std::vector<std::string>& builtin_default_examples();

}  // namespace iacforge::repair
