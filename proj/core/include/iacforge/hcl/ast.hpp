#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace iacforge::hcl {

// One expression on the right-hand side of an attribute. Literals, reference
// traversals and interpolated strings are modeled structurally; anything else
// (function calls, heredocs, arithmetic, conditionals) is kept as an Opaque
// slice of source text and carried through byte-for-byte.
struct Expression {
  enum class Kind {
    String,
    Number,
    Bool,
    List,
    Map,
    Reference,
    Interpolation,
    Opaque,
  };

  Kind kind = Kind::Opaque;

  // Source text of the expression, comments removed, otherwise verbatim.
  std::string raw;

  std::string string_value;               // String: decoded content
  std::string number_lexeme;              // Number: lexeme as written
  bool bool_value = false;                // Bool
  std::vector<Expression> elements;       // List
  std::vector<std::pair<std::string, Expression>> entries;  // Map, key as written
  std::vector<std::vector<std::string>> traversals;
  // Reference: one traversal (segments like {"var","region"} or
  // {"aws_s3_bucket","b","id"}; index steps kept as "[0]" / "[\"k\"]").
  // Interpolation: every pure-traversal "${...}" found in the template.

  const std::vector<std::string>& reference() const { return traversals.front(); }
};

struct Attribute {
  std::string name;
  Expression value;
  int line = 0;
};

struct Block;

struct Body {
  std::vector<Attribute> attributes;  // source order; names unique per body
  std::vector<Block> blocks;          // source order
};

enum class BlockKind {
  Terraform,
  Provider,
  Resource,
  Data,
  Variable,
  Output,
  Locals,
  Other,  // any further keyword (module, moved, ...), preserved as written
};

struct Block {
  BlockKind kind = BlockKind::Other;
  std::string keyword;  // as written in source
  std::vector<std::string> labels;
  Body body;
  int line = 0;

  // "aws_s3_bucket.b" for resources, "data.aws_ami.x" for data sources,
  // empty for other kinds.
  std::string address() const;
};

struct Configuration {
  std::vector<Block> blocks;
  std::string source_text;
  std::string canonical_hash;  // hex SHA-256 of the canonical form
};

std::string_view to_keyword(BlockKind kind);
BlockKind block_kind_from_keyword(std::string_view keyword);

}  // namespace iacforge::hcl
