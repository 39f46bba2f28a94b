#include "iacforge/util/tool_config.hpp"

#include <cstdlib>
#include <sstream>
#include <thread>

#include "iacforge/util/jsonl.hpp"

namespace iacforge::util {

namespace {

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (c == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

std::string parse_string_value(const std::string& raw, int lineno) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') {
    throw ConfigError("config line " + std::to_string(lineno) + ": expected quoted string");
  }
  std::string out;
  for (size_t i = 1; i + 1 < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\\' && i + 2 < raw.size()) {
      char n = raw[++i];
      switch (n) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: out.push_back(n); break;
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

long parse_int_value(const std::string& raw, int lineno) {
  try {
    size_t used = 0;
    long v = std::stol(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(lineno) + ": expected integer, got '" + raw + "'");
  }
}

double parse_float_value(const std::string& raw, int lineno) {
  try {
    size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(lineno) + ": expected number, got '" + raw + "'");
  }
}

}  // namespace

int ToolConfig::effective_workers() const {
  if (workers > 0) return workers;
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

ToolConfig parse_tool_config(const std::string& text) {
  ToolConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(body.substr(0, eq));
    std::string raw = trim(body.substr(eq + 1));
    if (key.empty() || raw.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }

    if (key == "backend") {
      cfg.backend = parse_string_value(raw, lineno);
      if (cfg.backend != "builtin" && cfg.backend != "external") {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": backend must be \"builtin\" or \"external\"");
      }
    } else if (key == "terraform_bin") {
      cfg.terraform_bin = parse_string_value(raw, lineno);
    } else if (key == "opa_bin") {
      cfg.opa_bin = parse_string_value(raw, lineno);
    } else if (key == "tflint_bin") {
      cfg.tflint_bin = parse_string_value(raw, lineno);
    } else if (key == "checkov_bin") {
      cfg.checkov_bin = parse_string_value(raw, lineno);
    } else if (key == "llm_endpoint") {
      cfg.llm_endpoint = parse_string_value(raw, lineno);
    } else if (key == "llm_model") {
      cfg.llm_model = parse_string_value(raw, lineno);
    } else if (key == "llm_temperature") {
      cfg.llm_temperature = parse_float_value(raw, lineno);
    } else if (key == "llm_max_tokens") {
      cfg.llm_max_tokens = static_cast<int>(parse_int_value(raw, lineno));
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_int_value(raw, lineno));
    } else if (key == "timeout_secs") {
      cfg.timeout_secs = static_cast<int>(parse_int_value(raw, lineno));
    } else if (key == "max_turns") {
      cfg.max_turns = static_cast<int>(parse_int_value(raw, lineno));
    } else if (key == "port") {
      cfg.port = static_cast<int>(parse_int_value(raw, lineno));
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

ToolConfig load_tool_config(const std::optional<std::filesystem::path>& path) {
  ToolConfig cfg;
  std::filesystem::path file;
  if (path) {
    file = *path;
    if (!std::filesystem::exists(file)) {
      throw ConfigError("config file not found: " + file.string());
    }
  } else if (std::filesystem::exists("iacforge.toml")) {
    file = "iacforge.toml";
  }
  if (!file.empty()) {
    cfg = parse_tool_config(read_text_file(file));
  }

  if (const char* v = std::getenv("IACFORGE_TERRAFORM_BIN"); v && *v) cfg.terraform_bin = v;
  if (const char* v = std::getenv("IACFORGE_OPA_BIN"); v && *v) cfg.opa_bin = v;
  if (const char* v = std::getenv("IACFORGE_TFLINT_BIN"); v && *v) cfg.tflint_bin = v;
  if (const char* v = std::getenv("IACFORGE_CHECKOV_BIN"); v && *v) cfg.checkov_bin = v;
  return cfg;
}

}  // namespace iacforge::util
