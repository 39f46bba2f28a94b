#pragma once

#include <random>
#include <string>

namespace testsupport {

// Which defect, if any, an invalid generated config carries.
enum class Defect {
  None,
  UnresolvedRef,
  DuplicateAddress,
  MissingDefault,
  Cycle,
  UnknownProvider,
  LabelCount,
};

struct GenOptions {
  int max_resources = 6;
  bool noise = false;            // comments, blank lines, messy indentation
  Defect defect = Defect::None;  // injected verbatim into otherwise-valid text
};

// Deterministic (for a given rng state) configuration text. With
// Defect::None the result validates and plans with the builtin passes.
std::string random_config(std::mt19937_64& rng, const GenOptions& options = {});

// Picks a random defect (never None).
Defect random_defect(std::mt19937_64& rng);

}  // namespace testsupport
