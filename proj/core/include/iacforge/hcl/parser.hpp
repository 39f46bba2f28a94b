#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "iacforge/hcl/ast.hpp"

namespace iacforge::hcl {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& message)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + message),
        line(line_),
        col(col_) {}
};

// Parses a configuration in the supported language subset. The returned
// Configuration carries the original text and its canonical hash. Throws
// ParseError with a line/column on malformed input (unbalanced braces,
// bad block headers, unterminated strings or heredocs, duplicate attribute
// names within one body).
Configuration parse_config(std::string_view text);

}  // namespace iacforge::hcl
