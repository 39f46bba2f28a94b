#include "iacforge/verify/verify.hpp"

#include <chrono>

#include "iacforge/hcl/parser.hpp"
#include "internal.hpp"

namespace iacforge::verify {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::FV1: return "FV1";
    case Stage::FV2: return "FV2";
    case Stage::FV3: return "FV3";
  }
  return "FV1";
}

nlohmann::json Diagnostic::to_json() const {
  nlohmann::json j{
      {"stage", std::string(to_string(stage))},
      {"code", code},
      {"severity", severity == Severity::Error ? "error" : "warning"},
      {"message", message},
  };
  if (location) {
    j["location"] = {{"file", location->file}, {"line", location->line}, {"col", location->col}};
  }
  if (subject) j["subject"] = *subject;
  return j;
}

bool VerdictReport::has_error() const {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

std::string VerdictReport::certificate() const {
  std::string out;
  out += "stage: ";
  out += to_string(stage);
  out += passed ? "\nresult: pass\n" : "\nresult: fail\n";
  for (const auto& d : diagnostics) {
    out += d.severity == Severity::Error ? "error" : "warning";
    out += " [";
    out += d.code;
    out += "]";
    if (d.subject) {
      out += " (";
      out += *d.subject;
      out += ")";
    }
    out += ": ";
    out += d.message;
    if (d.location && d.location->line > 0) {
      out += " (line " + std::to_string(d.location->line) + ")";
    }
    out += "\n";
  }
  return out;
}

nlohmann::json VerdictReport::to_json() const {
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : diagnostics) diags.push_back(d.to_json());
  return nlohmann::json{
      {"stage", std::string(to_string(stage))}, {"passed", passed},
      {"diagnostics", std::move(diags)},        {"elapsed_secs", elapsed_secs},
      {"backend", backend},
  };
}

const std::set<std::string>& implicit_provider_allowlist() {
  static const std::set<std::string> allowlist{
      "aws",  "random",   "null", "local",   "template", "tls",
      "time", "external", "http", "archive", "docker",   "terraform",
  };
  return allowlist;
}

namespace detail {

SymbolTable build_symbols(const hcl::Configuration& config, std::vector<Diagnostic>* diags) {
  SymbolTable sym;
  auto dup = [&](const std::string& address, int line) {
    if (!diags) return;
    Diagnostic d;
    d.stage = Stage::FV1;
    d.code = "DUP_ADDRESS";
    d.message = "duplicate address '" + address + "'";
    d.subject = address;
    d.location = SourceLocation{"", line, 0};
    diags->push_back(std::move(d));
  };

  for (const auto& b : config.blocks) {
    switch (b.kind) {
      case hcl::BlockKind::Variable:
        if (b.labels.size() == 1) sym.variables.emplace(b.labels[0], &b);
        break;
      case hcl::BlockKind::Locals:
        for (const auto& a : b.body.attributes) sym.locals.insert(a.name);
        break;
      case hcl::BlockKind::Resource:
        if (b.labels.size() == 2) {
          std::string addr = b.address();
          if (!sym.resources.emplace(addr, &b).second) dup(addr, b.line);
        }
        break;
      case hcl::BlockKind::Data:
        if (b.labels.size() == 2) {
          std::string addr = b.address();
          if (!sym.data_sources.emplace(addr, &b).second) dup(addr, b.line);
        }
        break;
      case hcl::BlockKind::Provider:
        if (b.labels.size() == 1) sym.providers.insert(b.labels[0]);
        break;
      case hcl::BlockKind::Other:
        if (b.keyword == "module" && b.labels.size() == 1) sym.modules.insert(b.labels[0]);
        break;
      default:
        break;
    }
  }
  return sym;
}

std::vector<std::string> effective_segments(const std::vector<std::string>& segs) {
  std::vector<std::string> out;
  for (const auto& s : segs) {
    if (!s.empty() && s[0] == '[') continue;
    out.push_back(s);
  }
  return out;
}

std::string provider_prefix(const std::string& type) {
  size_t p = type.find('_');
  return p == std::string::npos ? type : type.substr(0, p);
}

bool resolve_traversal(const SymbolTable& sym, const std::vector<std::string>& segs,
                       std::string* target) {
  auto eff = effective_segments(segs);
  if (eff.empty()) return false;
  const std::string& root = eff[0];

  static const std::set<std::string> builtin_roots{"path", "terraform", "each", "count", "self"};
  if (builtin_roots.count(root)) return true;

  if (root == "var") return eff.size() >= 2 && sym.variables.count(eff[1]) > 0;
  if (root == "local") return eff.size() >= 2 && sym.locals.count(eff[1]) > 0;
  if (root == "module") return eff.size() >= 2 && sym.modules.count(eff[1]) > 0;
  if (root == "data") {
    if (eff.size() < 3) return false;
    std::string addr = "data." + eff[1] + "." + eff[2];
    if (!sym.data_sources.count(addr)) return false;
    if (target) *target = addr;
    return true;
  }
  if (sym.providers.count(root) && eff.size() >= 2 && !sym.resources.count(root + "." + eff[1])) {
    // provider alias reference like `provider = aws.west`
    return true;
  }
  if (eff.size() >= 2) {
    std::string addr = root + "." + eff[1];
    if (sym.resources.count(addr)) {
      if (target) *target = addr;
      return true;
    }
  }
  return false;
}

}  // namespace detail

namespace {

using detail::SymbolTable;

std::string describe_owner(const hcl::Block& b) {
  std::string addr = b.address();
  if (!addr.empty()) return addr;
  std::string out = b.keyword;
  for (const auto& l : b.labels) out += "." + l;
  return out;
}

// Applies fn to every expression in the body, nested blocks included.
// fn(attribute, is_top_level_of_owner).
template <typename Fn>
void walk_attributes(const hcl::Body& body, bool top, Fn&& fn) {
  for (const auto& a : body.attributes) fn(a, top);
  for (const auto& nested : body.blocks) walk_attributes(nested.body, false, fn);
}

template <typename Fn>
void walk_traversals(const hcl::Expression& e, Fn&& fn) {
  switch (e.kind) {
    case hcl::Expression::Kind::Reference:
    case hcl::Expression::Kind::Interpolation:
      for (const auto& t : e.traversals) fn(t);
      break;
    case hcl::Expression::Kind::List:
      for (const auto& el : e.elements) walk_traversals(el, fn);
      break;
    case hcl::Expression::Kind::Map:
      for (const auto& [k, v] : e.entries) walk_traversals(v, fn);
      break;
    default:
      break;
  }
}

void check_depends_on(const hcl::Block& owner, const hcl::Attribute& attr,
                      const SymbolTable& sym, std::vector<Diagnostic>& diags) {
  auto fail = [&](const std::string& message) {
    Diagnostic d;
    d.stage = Stage::FV1;
    d.code = "DEPENDS_ON_INVALID";
    d.message = message;
    d.subject = describe_owner(owner);
    d.location = SourceLocation{"", attr.line, 0};
    diags.push_back(std::move(d));
  };

  if (attr.value.kind != hcl::Expression::Kind::List) {
    fail("depends_on must be a list of resource addresses");
    return;
  }
  for (const auto& el : attr.value.elements) {
    if (el.kind != hcl::Expression::Kind::Reference) {
      fail("depends_on entry '" + el.raw + "' is not a resource address");
      continue;
    }
    std::string target;
    if (!detail::resolve_traversal(sym, el.reference(), &target) || target.empty()) {
      fail("depends_on entry '" + el.raw + "' does not name a declared resource");
    }
  }
}

}  // namespace

VerdictReport validate(const hcl::Configuration& config) {
  auto t0 = std::chrono::steady_clock::now();
  VerdictReport report;
  report.stage = Stage::FV1;
  report.backend = "builtin";

  auto& diags = report.diagnostics;

  // Label arity per block kind.
  for (const auto& b : config.blocks) {
    size_t want = 0, got = b.labels.size();
    bool check = true;
    switch (b.kind) {
      case hcl::BlockKind::Terraform:
      case hcl::BlockKind::Locals: want = 0; break;
      case hcl::BlockKind::Provider:
      case hcl::BlockKind::Variable:
      case hcl::BlockKind::Output: want = 1; break;
      case hcl::BlockKind::Resource:
      case hcl::BlockKind::Data: want = 2; break;
      case hcl::BlockKind::Other: check = false; break;
    }
    if (check && got != want) {
      Diagnostic d;
      d.stage = Stage::FV1;
      d.code = "LABEL_COUNT";
      d.message = "block '" + b.keyword + "' takes " + std::to_string(want) + " label" +
                  (want == 1 ? "" : "s") + ", found " + std::to_string(got);
      d.subject = describe_owner(b);
      d.location = SourceLocation{"", b.line, 0};
      diags.push_back(std::move(d));
    }
  }

  SymbolTable sym = detail::build_symbols(config, &diags);

  for (const auto& b : config.blocks) {
    walk_attributes(b.body, true, [&](const hcl::Attribute& attr, bool top) {
      bool is_depends_on = top && attr.name == "depends_on" &&
                           (b.kind == hcl::BlockKind::Resource || b.kind == hcl::BlockKind::Data);
      if (is_depends_on) {
        check_depends_on(b, attr, sym, diags);
        return;
      }
      walk_traversals(attr.value, [&](const std::vector<std::string>& segs) {
        if (detail::resolve_traversal(sym, segs, nullptr)) return;
        std::string path;
        for (const auto& s : detail::effective_segments(segs)) {
          if (!path.empty()) path += ".";
          path += s;
        }
        Diagnostic d;
        d.stage = Stage::FV1;
        d.code = "UNRESOLVED_REF";
        d.message = "reference to undeclared object '" + path + "'";
        d.subject = describe_owner(b);
        d.location = SourceLocation{"", attr.line, 0};
        diags.push_back(std::move(d));
      });
    });
  }

  report.passed = !report.has_error();
  report.elapsed_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

VerdictReport validate_text(std::string_view text) {
  try {
    return validate(hcl::parse_config(text));
  } catch (const hcl::ParseError& e) {
    VerdictReport report;
    report.stage = Stage::FV1;
    report.backend = "builtin";
    report.passed = false;
    Diagnostic d;
    d.stage = Stage::FV1;
    d.code = "PARSE";
    d.message = e.what();
    d.location = SourceLocation{"", e.line, e.col};
    report.diagnostics.push_back(std::move(d));
    return report;
  }
}

}  // namespace iacforge::verify
