#include "iacforge/hcl/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace iacforge::hcl {

namespace {

std::string quote_label(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c); break;
    }
  }
  out.push_back('"');
  return out;
}

std::string render_expression(const Expression& e) {
  switch (e.kind) {
    case Expression::Kind::String:
    case Expression::Kind::Interpolation:
    case Expression::Kind::Number:
    case Expression::Kind::Opaque:
      return e.raw;
    case Expression::Kind::Bool:
      return e.bool_value ? "true" : "false";
    case Expression::Kind::List: {
      std::string out = "[";
      for (size_t i = 0; i < e.elements.size(); ++i) {
        if (i) out += ", ";
        out += render_expression(e.elements[i]);
      }
      out += "]";
      return out;
    }
    case Expression::Kind::Map: {
      if (e.entries.empty()) return "{}";
      std::vector<size_t> order(e.entries.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return e.entries[a].first < e.entries[b].first;
      });
      std::string out = "{ ";
      for (size_t i = 0; i < order.size(); ++i) {
        if (i) out += ", ";
        out += e.entries[order[i]].first;
        out += " = ";
        out += render_expression(e.entries[order[i]].second);
      }
      out += " }";
      return out;
    }
    case Expression::Kind::Reference: {
      const auto& segs = e.reference();
      std::string out = segs.empty() ? std::string() : segs[0];
      for (size_t i = 1; i < segs.size(); ++i) {
        if (!segs[i].empty() && segs[i][0] == '[') {
          out += segs[i];
        } else {
          out += ".";
          out += segs[i];
        }
      }
      return out;
    }
  }
  return e.raw;
}

void render_body(const Body& body, int indent, std::string& out);

void render_block(const Block& block, int indent, std::string& out) {
  std::string ind(static_cast<size_t>(indent), ' ');
  out += ind;
  out += block.keyword;
  for (const auto& label : block.labels) {
    out += " ";
    out += quote_label(label);
  }
  if (block.body.attributes.empty() && block.body.blocks.empty()) {
    out += " {}\n";
    return;
  }
  out += " {\n";
  render_body(block.body, indent + 2, out);
  out += ind;
  out += "}\n";
}

void render_body(const Body& body, int indent, std::string& out) {
  std::string ind(static_cast<size_t>(indent), ' ');

  std::vector<size_t> order(body.attributes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return body.attributes[a].name < body.attributes[b].name;
  });

  for (size_t idx : order) {
    const auto& attr = body.attributes[idx];
    out += ind;
    out += attr.name;
    out += " = ";
    out += render_expression(attr.value);
    out += "\n";
  }
  for (const auto& nested : body.blocks) {
    render_block(nested, indent, out);
  }
}

}  // namespace

std::string canonicalize(const Configuration& config) {
  std::string out;
  for (size_t i = 0; i < config.blocks.size(); ++i) {
    if (i) out += "\n";
    render_block(config.blocks[i], 0, out);
  }
  return out;
}

bool structurally_equal(const Configuration& a, const Configuration& b) {
  return canonicalize(a) == canonicalize(b);
}

std::string concat_module(const std::vector<std::pair<std::string, std::string>>& files) {
  if (files.empty()) throw EmptyModule();
  auto sorted = files;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const auto& name = sorted[i].first;
    if (name.size() < 3 || name.substr(name.size() - 3) != ".tf") {
      throw std::invalid_argument("concat_module: not a .tf file: " + name);
    }
    if (i) out += "\n\n";
    out += sorted[i].second;
  }
  return out;
}

}  // namespace iacforge::hcl
