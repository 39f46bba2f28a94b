#pragma once

// Shared internals of the builtin validate/plan passes.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iacforge/hcl/ast.hpp"
#include "iacforge/verify/diagnostic.hpp"

namespace iacforge::verify::detail {

struct SymbolTable {
  std::map<std::string, const hcl::Block*> variables;     // name
  std::set<std::string> locals;                           // attribute names
  std::map<std::string, const hcl::Block*> resources;     // "type.name"
  std::map<std::string, const hcl::Block*> data_sources;  // "data.type.name"
  std::set<std::string> providers;                        // declared names
  std::set<std::string> modules;                          // module block names
};

// Collects declarations; duplicate resource/data addresses are reported into
// `diags` (first declaration wins in the table).
SymbolTable build_symbols(const hcl::Configuration& config, std::vector<Diagnostic>* diags);

// Traversal segments with "[index]" steps removed.
std::vector<std::string> effective_segments(const std::vector<std::string>& segs);

// True when the traversal resolves against declared symbols or a builtin
// root (path, terraform, each, count, self). When it names a resource or
// data node, `target` receives that node's address.
bool resolve_traversal(const SymbolTable& sym, const std::vector<std::string>& segs,
                       std::string* target);

// Provider prefix of a resource type: "aws_s3_bucket" -> "aws".
std::string provider_prefix(const std::string& type);

}  // namespace iacforge::verify::detail
