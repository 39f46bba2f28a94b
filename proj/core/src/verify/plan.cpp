#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>

#include "iacforge/hcl/parser.hpp"
#include "iacforge/verify/verify.hpp"
#include "internal.hpp"

namespace iacforge::verify {

namespace {

using detail::SymbolTable;

nlohmann::json number_from_lexeme(const std::string& lexeme) {
  if (lexeme.find('.') != std::string::npos || lexeme.find('e') != std::string::npos ||
      lexeme.find('E') != std::string::npos) {
    try {
      return nlohmann::json(std::stod(lexeme));
    } catch (const std::exception&) {
      return nlohmann::json(lexeme);
    }
  }
  try {
    return nlohmann::json(static_cast<std::int64_t>(std::stoll(lexeme)));
  } catch (const std::exception&) {
    try {
      return nlohmann::json(std::stod(lexeme));
    } catch (const std::exception&) {
      return nlohmann::json(lexeme);
    }
  }
}

std::string decode_map_key(const std::string& key) {
  if (key.size() >= 2 && key.front() == '"' && key.back() == '"') {
    std::string out;
    for (size_t i = 1; i + 1 < key.size(); ++i) {
      if (key[i] == '\\' && i + 2 < key.size()) {
        out.push_back(key[++i]);
      } else {
        out.push_back(key[i]);
      }
    }
    return out;
  }
  return key;
}

struct Resolver {
  const SymbolTable& sym;
  std::set<std::string> in_flight;  // guards var/local reference chains

  nlohmann::json resolve(const hcl::Expression& e) {
    using Kind = hcl::Expression::Kind;
    switch (e.kind) {
      case Kind::String: return e.string_value;
      case Kind::Number: return number_from_lexeme(e.number_lexeme);
      case Kind::Bool: return e.bool_value;
      case Kind::List: {
        auto arr = nlohmann::json::array();
        for (const auto& el : e.elements) arr.push_back(resolve(el));
        return arr;
      }
      case Kind::Map: {
        auto obj = nlohmann::json::object();
        for (const auto& [k, v] : e.entries) obj[decode_map_key(k)] = resolve(v);
        return obj;
      }
      case Kind::Reference: return resolve_reference(e.reference());
      case Kind::Interpolation: return interpolate(e.raw);
      case Kind::Opaque: return kComputed;
    }
    return kComputed;
  }

  nlohmann::json resolve_reference(const std::vector<std::string>& segs) {
    auto eff = detail::effective_segments(segs);
    if (eff.size() == 2 && eff[0] == "var") {
      auto it = sym.variables.find(eff[1]);
      if (it == sym.variables.end()) return kComputed;
      std::string key = "var." + eff[1];
      if (in_flight.count(key)) return kComputed;
      for (const auto& a : it->second->body.attributes) {
        if (a.name == "default") {
          in_flight.insert(key);
          auto v = resolve(a.value);
          in_flight.erase(key);
          return v;
        }
      }
      return kComputed;
    }
    if (eff.size() == 2 && eff[0] == "local") {
      std::string key = "local." + eff[1];
      if (in_flight.count(key)) return kComputed;
      for (const auto& b : sym_locals_blocks()) {
        for (const auto& a : b->body.attributes) {
          if (a.name == eff[1]) {
            in_flight.insert(key);
            auto v = resolve(a.value);
            in_flight.erase(key);
            return v;
          }
        }
      }
      return kComputed;
    }
    return kComputed;
  }

  // Locals bodies are not kept in the symbol table; the resolver gets them
  // injected once per configuration.
  std::vector<const hcl::Block*> locals_blocks;
  const std::vector<const hcl::Block*>& sym_locals_blocks() const { return locals_blocks; }

  // Rebuilds a template string, substituting pure-traversal "${...}" parts
  // that resolve to scalars. Anything else collapses to <computed>.
  nlohmann::json interpolate(const std::string& raw) {
    if (raw.size() < 2) return kComputed;
    std::string out;
    size_t i = 1;                  // skip opening quote
    size_t end = raw.size() - 1;   // closing quote
    while (i < end) {
      char c = raw[i];
      if (c == '\\' && i + 1 < end) {
        char esc = raw[i + 1];
        switch (esc) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: out.push_back('\\'); out.push_back(esc); break;
        }
        i += 2;
        continue;
      }
      if ((c == '$' || c == '%') && i + 2 < end && raw[i + 1] == c && raw[i + 2] == '{') {
        out.push_back(c);
        out.push_back('{');
        i += 3;
        continue;
      }
      if (c == '%' && i + 1 < end && raw[i + 1] == '{') {
        return kComputed;  // directives are never evaluated
      }
      if (c == '$' && i + 1 < end && raw[i + 1] == '{') {
        size_t j = i + 2;
        int depth = 1;
        while (j < end && depth > 0) {
          if (raw[j] == '{') ++depth;
          if (raw[j] == '}') --depth;
          ++j;
        }
        if (depth != 0) return kComputed;
        std::string inner = raw.substr(i + 2, j - i - 3);
        auto scalar = resolve_template_part(inner);
        if (!scalar) return kComputed;
        out += *scalar;
        i = j;
        continue;
      }
      out.push_back(c);
      ++i;
    }
    return out;
  }

  std::optional<std::string> resolve_template_part(const std::string& inner) {
    // Parse the part as a standalone expression; only references count.
    hcl::Configuration probe;
    std::string text = "x { y = " + inner + " }";
    try {
      probe = hcl::parse_config(text);
    } catch (const hcl::ParseError&) {
      return std::nullopt;
    }
    if (probe.blocks.size() != 1 || probe.blocks[0].body.attributes.size() != 1)
      return std::nullopt;
    const auto& expr = probe.blocks[0].body.attributes[0].value;
    if (expr.kind != hcl::Expression::Kind::Reference) return std::nullopt;
    auto v = resolve_reference(expr.reference());
    if (v.is_string()) {
      if (v.get<std::string>() == kComputed) return std::nullopt;
      return v.get<std::string>();
    }
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return nlohmann::json(v).dump();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return std::nullopt;
  }
};

nlohmann::json flatten_body(const hcl::Body& body, Resolver& resolver, bool skip_depends_on) {
  auto obj = nlohmann::json::object();
  for (const auto& a : body.attributes) {
    if (skip_depends_on && a.name == "depends_on") continue;
    obj[a.name] = resolver.resolve(a.value);
  }
  std::map<std::string, std::vector<nlohmann::json>> grouped;
  std::vector<std::string> group_order;
  for (const auto& nested : body.blocks) {
    if (!grouped.count(nested.keyword)) group_order.push_back(nested.keyword);
    grouped[nested.keyword].push_back(flatten_body(nested.body, resolver, false));
  }
  for (const auto& kw : group_order) {
    auto& items = grouped[kw];
    if (items.size() == 1) {
      obj[kw] = std::move(items[0]);
    } else {
      obj[kw] = nlohmann::json(std::move(items));
    }
  }
  return obj;
}

Resolver make_resolver(const hcl::Configuration& config, const SymbolTable& sym) {
  Resolver r{sym, {}, {}};
  for (const auto& b : config.blocks) {
    if (b.kind == hcl::BlockKind::Locals) r.locals_blocks.push_back(&b);
  }
  return r;
}

template <typename Fn>
void walk_expr_traversals(const hcl::Expression& e, Fn&& fn) {
  switch (e.kind) {
    case hcl::Expression::Kind::Reference:
    case hcl::Expression::Kind::Interpolation:
      for (const auto& t : e.traversals) fn(t);
      break;
    case hcl::Expression::Kind::List:
      for (const auto& el : e.elements) walk_expr_traversals(el, fn);
      break;
    case hcl::Expression::Kind::Map:
      for (const auto& [k, v] : e.entries) walk_expr_traversals(v, fn);
      break;
    default:
      break;
  }
}

template <typename Fn>
void walk_body_traversals(const hcl::Body& body, Fn&& fn) {
  for (const auto& a : body.attributes) walk_expr_traversals(a.value, fn);
  for (const auto& nested : body.blocks) walk_body_traversals(nested.body, fn);
}

}  // namespace

// Depth-first search; the first cycle found comes back as a node path.
std::optional<std::vector<std::string>> find_cycle(
    const std::vector<std::string>& nodes,
    const std::map<std::string, std::vector<std::string>>& adj) {
  std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
  std::vector<std::string> stack;
  std::optional<std::vector<std::string>> found;

  std::function<bool(const std::string&)> visit = [&](const std::string& n) -> bool {
    color[n] = 1;
    stack.push_back(n);
    auto it = adj.find(n);
    if (it != adj.end()) {
      for (const auto& next : it->second) {
        int c = color.count(next) ? color[next] : 0;
        if (c == 1) {
          auto pos = std::find(stack.begin(), stack.end(), next);
          std::vector<std::string> cyc(pos, stack.end());
          cyc.push_back(next);
          found = std::move(cyc);
          return true;
        }
        if (c == 0 && visit(next)) return true;
      }
    }
    stack.pop_back();
    color[n] = 2;
    return false;
  };

  for (const auto& n : nodes) {
    if (!color.count(n) || color[n] == 0) {
      if (visit(n)) return found;
    }
  }
  return std::nullopt;
}

nlohmann::json PlanDocument::to_json() const {
  nlohmann::json res = nlohmann::json::object();
  for (const auto& [addr, attrs] : resources) res[addr] = attrs;
  nlohmann::json edge_arr = nlohmann::json::array();
  for (const auto& [from, to] : edges) edge_arr.push_back({from, to});
  nlohmann::json prov = nlohmann::json::array();
  for (const auto& p : providers) prov.push_back(p);
  return nlohmann::json{
      {"providers", std::move(prov)},
      {"resources", std::move(res)},
      {"edges", std::move(edge_arr)},
  };
}

std::string PlanDocument::to_canonical_json() const { return to_json().dump(); }

PlanDocument PlanDocument::from_json(const nlohmann::json& j) {
  PlanDocument doc;
  if (j.contains("resources")) {
    for (auto it = j["resources"].begin(); it != j["resources"].end(); ++it) {
      doc.resources[it.key()] = it.value();
    }
  }
  if (j.contains("edges")) {
    for (const auto& e : j["edges"]) {
      if (e.is_array() && e.size() == 2) {
        doc.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
  }
  if (j.contains("providers")) {
    for (const auto& p : j["providers"]) doc.providers.insert(p.get<std::string>());
  }
  return doc;
}

std::map<std::string, nlohmann::json> flatten_resources(const hcl::Configuration& config) {
  SymbolTable sym = detail::build_symbols(config, nullptr);
  Resolver resolver = make_resolver(config, sym);
  std::map<std::string, nlohmann::json> out;
  for (const auto& b : config.blocks) {
    if (b.kind != hcl::BlockKind::Resource && b.kind != hcl::BlockKind::Data) continue;
    std::string addr = b.address();
    if (addr.empty()) continue;
    if (out.count(addr)) continue;  // first declaration wins
    out[addr] = flatten_body(b.body, resolver, true);
  }
  return out;
}

std::pair<VerdictReport, std::optional<PlanDocument>> plan(const hcl::Configuration& config) {
  auto t0 = std::chrono::steady_clock::now();
  VerdictReport report;
  report.stage = Stage::FV2;
  report.backend = "builtin";

  auto finish = [&](std::optional<PlanDocument> doc) {
    report.passed = !report.has_error();
    if (!report.passed) doc.reset();
    report.elapsed_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::make_pair(report, std::move(doc));
  };

  VerdictReport fv1 = validate(config);
  if (!fv1.passed) {
    Diagnostic d;
    d.stage = Stage::FV2;
    d.code = "NOT_VALIDATED";
    d.message = "configuration did not pass validation";
    report.diagnostics.push_back(std::move(d));
    for (auto& inner : fv1.diagnostics) report.diagnostics.push_back(std::move(inner));
    return finish(std::nullopt);
  }

  SymbolTable sym = detail::build_symbols(config, nullptr);

  for (const auto& b : config.blocks) {
    if (b.kind != hcl::BlockKind::Variable || b.labels.size() != 1) continue;
    bool has_default = false;
    for (const auto& a : b.body.attributes) {
      if (a.name == "default") has_default = true;
    }
    if (!has_default) {
      Diagnostic d;
      d.stage = Stage::FV2;
      d.code = "MISSING_DEFAULT";
      d.message = "variable '" + b.labels[0] + "' has no default value and cannot be planned "
                  "non-interactively";
      d.subject = b.labels[0];
      d.location = SourceLocation{"", b.line, 0};
      report.diagnostics.push_back(std::move(d));
    }
  }

  for (const auto& b : config.blocks) {
    if (b.kind != hcl::BlockKind::Resource && b.kind != hcl::BlockKind::Data) continue;
    if (b.labels.size() != 2) continue;
    std::string prefix = detail::provider_prefix(b.labels[0]);
    if (!sym.providers.count(prefix) && !implicit_provider_allowlist().count(prefix)) {
      Diagnostic d;
      d.stage = Stage::FV2;
      d.code = "UNKNOWN_PROVIDER";
      d.message = "no provider '" + prefix + "' is declared or implied for '" + b.labels[0] + "'";
      d.subject = b.address();
      d.location = SourceLocation{"", b.line, 0};
      report.diagnostics.push_back(std::move(d));
    }
  }

  // Dependency edges: dependent -> dependency.
  std::vector<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edge_set;
  for (const auto& b : config.blocks) {
    if (b.kind != hcl::BlockKind::Resource && b.kind != hcl::BlockKind::Data) continue;
    std::string addr = b.address();
    if (addr.empty()) continue;
    nodes.push_back(addr);
    walk_body_traversals(b.body, [&](const std::vector<std::string>& segs) {
      std::string target;
      if (detail::resolve_traversal(sym, segs, &target) && !target.empty()) {
        edge_set.emplace(addr, target);
      }
    });
  }

  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [from, to] : edge_set) adj[from].push_back(to);

  std::sort(nodes.begin(), nodes.end());
  if (auto cycle = find_cycle(nodes, adj)) {
    std::string path;
    for (const auto& n : *cycle) {
      if (!path.empty()) path += " -> ";
      path += n;
    }
    Diagnostic d;
    d.stage = Stage::FV2;
    d.code = "CYCLE";
    d.message = "dependency cycle: " + path;
    d.subject = cycle->front();
    report.diagnostics.push_back(std::move(d));
  }

  if (report.has_error()) return finish(std::nullopt);

  PlanDocument doc;
  Resolver resolver = make_resolver(config, sym);
  for (const auto& b : config.blocks) {
    if (b.kind != hcl::BlockKind::Resource && b.kind != hcl::BlockKind::Data) continue;
    std::string addr = b.address();
    if (addr.empty()) continue;
    doc.resources[addr] = flatten_body(b.body, resolver, true);
    doc.providers.insert(detail::provider_prefix(b.labels[0]));
  }
  doc.providers.insert(sym.providers.begin(), sym.providers.end());
  doc.edges.assign(edge_set.begin(), edge_set.end());
  std::sort(doc.edges.begin(), doc.edges.end());

  return finish(std::move(doc));
}

std::pair<VerdictReport, std::optional<PlanDocument>> plan_text(std::string_view text) {
  try {
    return plan(hcl::parse_config(text));
  } catch (const hcl::ParseError& e) {
    VerdictReport report;
    report.stage = Stage::FV2;
    report.backend = "builtin";
    report.passed = false;
    Diagnostic d;
    d.stage = Stage::FV2;
    d.code = "PARSE";
    d.message = e.what();
    d.location = SourceLocation{"", e.line, e.col};
    report.diagnostics.push_back(std::move(d));
    return {report, std::nullopt};
  }
}

}  // namespace iacforge::verify
