#include "iacforge/hcl/parser.hpp"

#include <array>
#include <cctype>
#include <optional>
#include <set>

#include "iacforge/hcl/canonical.hpp"
#include "iacforge/util/sha256.hpp"

namespace iacforge::hcl {

std::string_view to_keyword(BlockKind kind) {
  switch (kind) {
    case BlockKind::Terraform: return "terraform";
    case BlockKind::Provider: return "provider";
    case BlockKind::Resource: return "resource";
    case BlockKind::Data: return "data";
    case BlockKind::Variable: return "variable";
    case BlockKind::Output: return "output";
    case BlockKind::Locals: return "locals";
    case BlockKind::Other: return "";
  }
  return "";
}

BlockKind block_kind_from_keyword(std::string_view keyword) {
  if (keyword == "terraform") return BlockKind::Terraform;
  if (keyword == "provider") return BlockKind::Provider;
  if (keyword == "resource") return BlockKind::Resource;
  if (keyword == "data") return BlockKind::Data;
  if (keyword == "variable") return BlockKind::Variable;
  if (keyword == "output") return BlockKind::Output;
  if (keyword == "locals") return BlockKind::Locals;
  return BlockKind::Other;
}

std::string Block::address() const {
  if (labels.size() < 2) return {};
  if (kind == BlockKind::Resource) return labels[0] + "." + labels[1];
  if (kind == BlockKind::Data) return "data." + labels[0] + "." + labels[1];
  return {};
}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Character-level scanner with line/column tracking.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : s_(text) {}

  bool eof() const { return pos_ >= s_.size(); }
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }
  int line() const { return line_; }
  int col() const { return col_; }
  size_t pos() const { return pos_; }
  std::string_view slice(size_t from, size_t to) const { return s_.substr(from, to - from); }

  char advance() {
    char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, col_, message); }
  [[noreturn]] void fail_at(int l, int c, const std::string& message) const {
    throw ParseError(l, c, message);
  }

  void skip_inline_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  // Whitespace, newlines and all comment forms.
  void skip_trivia() {
    for (;;) {
      if (eof()) return;
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#' || (c == '/' && peek(1) == '/')) {
        while (!eof() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        skip_block_comment();
      } else {
        return;
      }
    }
  }

  void skip_block_comment() {
    int l = line_, c = col_;
    advance();
    advance();
    for (;;) {
      if (eof()) fail_at(l, c, "unterminated comment");
      if (peek() == '*' && peek(1) == '/') {
        advance();
        advance();
        return;
      }
      advance();
    }
  }

  std::string scan_ident() {
    if (eof() || !is_ident_start(peek())) fail("expected identifier");
    std::string out;
    while (!eof() && is_ident_char(peek())) out.push_back(advance());
    return out;
  }

  struct ScannedString {
    std::string raw;      // including quotes
    std::string decoded;  // backslash escapes resolved
    bool has_template = false;
  };

  // Scans a quoted string starting at '"'. Understands backslash escapes and
  // "${...}" / "%{...}" templates (which may nest strings and braces).
  ScannedString scan_string() {
    int l = line_, c = col_;
    ScannedString out;
    out.raw.push_back(advance());  // opening quote
    for (;;) {
      if (eof() || peek() == '\n') fail_at(l, c, "unterminated string");
      char ch = peek();
      if (ch == '\\') {
        out.raw.push_back(advance());
        if (eof()) fail_at(l, c, "unterminated string");
        char esc = advance();
        out.raw.push_back(esc);
        switch (esc) {
          case 'n': out.decoded.push_back('\n'); break;
          case 't': out.decoded.push_back('\t'); break;
          case 'r': out.decoded.push_back('\r'); break;
          case '"': out.decoded.push_back('"'); break;
          case '\\': out.decoded.push_back('\\'); break;
          default:
            out.decoded.push_back('\\');
            out.decoded.push_back(esc);
            break;
        }
        continue;
      }
      if ((ch == '$' || ch == '%') && peek(1) == ch && peek(2) == '{') {
        // "$${" / "%%{" escape the template intro; both marker chars pass
        // through and the brace is treated as a plain character.
        out.raw.push_back(advance());
        out.raw.push_back(advance());
        out.decoded.push_back(ch);
        continue;
      }
      if ((ch == '$' || ch == '%') && peek(1) == '{') {
        out.has_template = true;
        scan_template(out, l, c);
        continue;
      }
      if (ch == '"') {
        out.raw.push_back(advance());
        return out;
      }
      out.raw.push_back(advance());
      out.decoded.push_back(ch);
    }
  }

  struct ScannedHeredoc {
    std::string raw;  // "<<EOF\n...\nEOF" verbatim
  };

  ScannedHeredoc scan_heredoc() {
    int l = line_, c = col_;
    ScannedHeredoc out;
    out.raw.push_back(advance());  // <
    out.raw.push_back(advance());  // <
    if (peek() == '-') out.raw.push_back(advance());
    if (eof() || !is_ident_start(peek())) fail_at(l, c, "malformed heredoc marker");
    std::string terminator;
    while (!eof() && is_ident_char(peek())) {
      terminator.push_back(peek());
      out.raw.push_back(advance());
    }
    while (!eof() && peek() != '\n') out.raw.push_back(advance());
    if (eof()) fail_at(l, c, "unterminated heredoc");
    out.raw.push_back(advance());  // newline after marker
    for (;;) {
      if (eof()) fail_at(l, c, "unterminated heredoc");
      std::string line_text;
      while (!eof() && peek() != '\n') line_text.push_back(advance());
      std::string trimmed = line_text;
      size_t b = trimmed.find_first_not_of(" \t\r");
      size_t e = trimmed.find_last_not_of(" \t\r");
      trimmed = b == std::string::npos ? "" : trimmed.substr(b, e - b + 1);
      out.raw += line_text;
      if (trimmed == terminator) return out;  // newline after it stays unconsumed
      if (eof()) fail_at(l, c, "unterminated heredoc");
      out.raw.push_back(advance());
    }
  }

 private:
  // Scans "${...}" / "%{...}" inside a string, appending verbatim to out.raw.
  void scan_template(ScannedString& out, int str_line, int str_col) {
    out.raw.push_back(advance());  // $ or %
    out.raw.push_back(advance());  // {
    int depth = 1;
    while (depth > 0) {
      if (eof()) fail_at(str_line, str_col, "unterminated string template");
      char ch = peek();
      if (ch == '"') {
        ScannedString nested = scan_string();
        out.raw += nested.raw;
        continue;
      }
      if (ch == '{') ++depth;
      if (ch == '}') --depth;
      out.raw.push_back(advance());
    }
  }

  std::string_view s_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Structural re-parse of a captured expression. Returns nullopt when the text
// is not a recognized literal, reference or template string; the caller then
// falls back to an Opaque expression.
class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  std::optional<Expression> parse_full() {
    auto e = parse();
    if (!e) return std::nullopt;
    skip_ws();
    if (pos_ != s_.size()) return std::nullopt;
    return e;
  }

  // Extracts every pure-traversal "${...}" from a template string body.
  static std::vector<std::vector<std::string>> template_traversals(std::string_view raw);

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::optional<Expression> parse() {
    skip_ws();
    if (eof()) return std::nullopt;
    char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_list();
    if (c == '{') return parse_map();
    if (is_digit(c) || (c == '-' && is_digit(peek(1)))) return parse_number();
    if (is_ident_start(c)) return parse_ident_or_reference();
    return std::nullopt;
  }

  std::optional<Expression> parse_string() {
    size_t start = pos_;
    std::string decoded;
    bool has_template = false;
    ++pos_;  // opening quote
    for (;;) {
      if (eof() || peek() == '\n') return std::nullopt;
      char ch = peek();
      if (ch == '\\') {
        ++pos_;
        if (eof()) return std::nullopt;
        char esc = s_[pos_++];
        switch (esc) {
          case 'n': decoded.push_back('\n'); break;
          case 't': decoded.push_back('\t'); break;
          case 'r': decoded.push_back('\r'); break;
          case '"': decoded.push_back('"'); break;
          case '\\': decoded.push_back('\\'); break;
          default:
            decoded.push_back('\\');
            decoded.push_back(esc);
            break;
        }
        continue;
      }
      if ((ch == '$' || ch == '%') && peek(1) == ch && peek(2) == '{') {
        decoded.push_back(ch);
        decoded.push_back(ch);  // keep the escaped form distinct in decoded
        pos_ += 2;
        continue;
      }
      if ((ch == '$' || ch == '%') && peek(1) == '{') {
        has_template = true;
        if (!skip_template()) return std::nullopt;
        continue;
      }
      if (ch == '"') {
        ++pos_;
        break;
      }
      decoded.push_back(ch);
      ++pos_;
    }
    Expression e;
    e.raw = std::string(s_.substr(start, pos_ - start));
    if (has_template) {
      e.kind = Expression::Kind::Interpolation;
      e.traversals = template_traversals(e.raw);
    } else {
      e.kind = Expression::Kind::String;
      e.string_value = std::move(decoded);
    }
    return e;
  }

  bool skip_template() {
    pos_ += 2;
    int depth = 1;
    while (depth > 0) {
      if (eof()) return false;
      char ch = peek();
      if (ch == '"') {
        // nested string inside the template
        ++pos_;
        while (!eof() && peek() != '"') {
          if (peek() == '\\') ++pos_;
          ++pos_;
        }
        if (eof()) return false;
        ++pos_;
        continue;
      }
      if (ch == '{') ++depth;
      if (ch == '}') --depth;
      ++pos_;
    }
    return true;
  }

  std::optional<Expression> parse_number() {
    size_t start = pos_;
    if (peek() == '-') ++pos_;
    while (is_digit(peek())) ++pos_;
    if (peek() == '.' && is_digit(peek(1))) {
      ++pos_;
      while (is_digit(peek())) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      size_t mark = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!is_digit(peek())) {
        pos_ = mark;
      } else {
        while (is_digit(peek())) ++pos_;
      }
    }
    if (!eof() && (is_ident_char(peek()) || peek() == '.')) return std::nullopt;
    Expression e;
    e.kind = Expression::Kind::Number;
    e.raw = std::string(s_.substr(start, pos_ - start));
    e.number_lexeme = e.raw;
    return e;
  }

  std::optional<Expression> parse_list() {
    size_t start = pos_;
    ++pos_;
    Expression e;
    e.kind = Expression::Kind::List;
    for (;;) {
      skip_ws();
      if (eof()) return std::nullopt;
      if (peek() == ']') {
        ++pos_;
        break;
      }
      auto item = parse();
      if (!item) return std::nullopt;
      // A multi-line opaque element (a heredoc, say) cannot be re-rendered
      // inline, so the whole container stays opaque.
      if (item->kind == Expression::Kind::Opaque && item->raw.find('\n') != std::string::npos)
        return std::nullopt;
      e.elements.push_back(std::move(*item));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        return std::nullopt;
      }
    }
    e.raw = std::string(s_.substr(start, pos_ - start));
    return e;
  }

  std::optional<Expression> parse_map() {
    size_t start = pos_;
    ++pos_;
    Expression e;
    e.kind = Expression::Kind::Map;
    for (;;) {
      skip_ws();
      if (eof()) return std::nullopt;
      if (peek() == '}') {
        ++pos_;
        break;
      }
      std::string key;
      if (peek() == '"') {
        size_t kstart = pos_;
        ++pos_;
        while (!eof() && peek() != '"') {
          if (peek() == '$' && peek(1) == '{') return std::nullopt;
          if (peek() == '\\') ++pos_;
          ++pos_;
        }
        if (eof()) return std::nullopt;
        ++pos_;
        key = std::string(s_.substr(kstart, pos_ - kstart));
      } else if (is_ident_start(peek())) {
        while (!eof() && is_ident_char(peek())) key.push_back(s_[pos_++]);
      } else {
        return std::nullopt;
      }
      skip_ws();
      if (peek() != '=' && peek() != ':') return std::nullopt;
      ++pos_;
      if (peek() == '=' || peek() == '>') return std::nullopt;  // ==, =>
      auto val = parse();
      if (!val) return std::nullopt;
      if (val->kind == Expression::Kind::Opaque && val->raw.find('\n') != std::string::npos)
        return std::nullopt;
      e.entries.emplace_back(std::move(key), std::move(*val));
      skip_ws();
      if (peek() == ',') ++pos_;
    }
    e.raw = std::string(s_.substr(start, pos_ - start));
    return e;
  }

  std::optional<Expression> parse_ident_or_reference() {
    size_t start = pos_;
    std::string first;
    while (!eof() && is_ident_char(peek())) first.push_back(s_[pos_++]);

    if (first == "true" || first == "false") {
      Expression e;
      e.kind = Expression::Kind::Bool;
      e.bool_value = first == "true";
      e.raw = first;
      return e;
    }

    std::vector<std::string> segments{first};
    for (;;) {
      if (peek() == '.' && is_ident_start(peek(1))) {
        ++pos_;
        std::string seg;
        while (!eof() && is_ident_char(peek())) seg.push_back(s_[pos_++]);
        segments.push_back(std::move(seg));
        continue;
      }
      if (peek() == '[') {
        size_t istart = pos_;
        ++pos_;
        int depth = 1;
        while (depth > 0) {
          if (eof()) return std::nullopt;
          char ch = peek();
          if (ch == '"') {
            ++pos_;
            while (!eof() && peek() != '"') {
              if (peek() == '\\') ++pos_;
              ++pos_;
            }
            if (eof()) return std::nullopt;
            ++pos_;
            continue;
          }
          if (ch == '[') ++depth;
          if (ch == ']') --depth;
          ++pos_;
        }
        segments.push_back(std::string(s_.substr(istart, pos_ - istart)));
        continue;
      }
      break;
    }

    skip_ws();
    if (peek() == '(') return std::nullopt;  // function call
    if (segments.size() < 2) return std::nullopt;

    Expression e;
    e.kind = Expression::Kind::Reference;
    e.raw = std::string(s_.substr(start, pos_ - start));
    // trim trailing ws picked up before the '(' check
    while (!e.raw.empty() && (e.raw.back() == ' ' || e.raw.back() == '\t' ||
                              e.raw.back() == '\n' || e.raw.back() == '\r'))
      e.raw.pop_back();
    e.traversals.push_back(std::move(segments));
    return e;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

std::vector<std::vector<std::string>> ExprParser::template_traversals(std::string_view raw) {
  std::vector<std::vector<std::string>> out;
  for (size_t i = 0; i + 1 < raw.size(); ++i) {
    if (raw[i] != '$' || raw[i + 1] != '{') continue;
    if (i > 0 && raw[i - 1] == '$') continue;  // "$${" escape
    size_t j = i + 2;
    int depth = 1;
    while (j < raw.size() && depth > 0) {
      if (raw[j] == '{') ++depth;
      if (raw[j] == '}') --depth;
      ++j;
    }
    if (depth != 0) break;
    std::string_view inner = raw.substr(i + 2, j - i - 3);
    size_t b = inner.find_first_not_of(" \t");
    size_t e = inner.find_last_not_of(" \t");
    if (b != std::string_view::npos) {
      ExprParser p(inner.substr(b, e - b + 1));
      auto expr = p.parse_full();
      if (expr && expr->kind == Expression::Kind::Reference) {
        out.push_back(expr->traversals.front());
      }
    }
    i = j - 1;
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : sc_(text) {}

  Configuration parse() {
    Configuration config;
    for (;;) {
      sc_.skip_trivia();
      if (sc_.eof()) break;
      config.blocks.push_back(parse_block(true));
    }
    return config;
  }

 private:
  Block parse_block(bool top_level) {
    Block b;
    b.line = sc_.line();
    int kw_line = sc_.line(), kw_col = sc_.col();
    if (!is_ident_start(sc_.peek())) {
      sc_.fail(top_level ? "expected block keyword" : "expected attribute or block");
    }
    b.keyword = sc_.scan_ident();
    b.kind = block_kind_from_keyword(b.keyword);

    for (;;) {
      sc_.skip_inline_ws();
      char c = sc_.peek();
      if (c == '"') {
        auto str = sc_.scan_string();
        if (str.has_template) {
          sc_.fail_at(kw_line, kw_col, "block label must be a plain string");
        }
        b.labels.push_back(str.decoded);
        if (b.labels.size() > 2) {
          sc_.fail_at(kw_line, kw_col, "too many labels for block '" + b.keyword + "'");
        }
        continue;
      }
      if (c == '{') break;
      sc_.fail_at(kw_line, kw_col, "malformed block header: expected label or '{'");
    }

    int open_line = sc_.line(), open_col = sc_.col();
    sc_.advance();  // '{'
    parse_body(b.body, open_line, open_col);
    return b;
  }

  void parse_body(Body& body, int open_line, int open_col) {
    std::set<std::string> seen_attrs;
    for (;;) {
      sc_.skip_trivia();
      if (sc_.eof()) sc_.fail_at(open_line, open_col, "unclosed block");
      if (sc_.peek() == '}') {
        sc_.advance();
        return;
      }
      if (!is_ident_start(sc_.peek())) {
        sc_.fail("expected attribute or block");
      }

      int item_line = sc_.line(), item_col = sc_.col();
      std::string name = sc_.scan_ident();
      sc_.skip_inline_ws();
      char c = sc_.peek();

      if (c == '=' && sc_.peek(1) != '=') {
        sc_.advance();
        if (!seen_attrs.insert(name).second) {
          sc_.fail_at(item_line, item_col, "duplicate attribute '" + name + "'");
        }
        Attribute attr;
        attr.name = std::move(name);
        attr.line = item_line;
        attr.value = capture_expression();
        body.attributes.push_back(std::move(attr));
        continue;
      }

      if (c == '"' || c == '{') {
        Block nested;
        nested.line = item_line;
        nested.keyword = name;
        nested.kind = BlockKind::Other;
        while (sc_.peek() == '"') {
          auto str = sc_.scan_string();
          if (str.has_template) sc_.fail_at(item_line, item_col, "block label must be a plain string");
          nested.labels.push_back(str.decoded);
          if (nested.labels.size() > 2) {
            sc_.fail_at(item_line, item_col, "too many labels for block '" + nested.keyword + "'");
          }
          sc_.skip_inline_ws();
        }
        if (sc_.peek() != '{') sc_.fail("malformed block header: expected '{'");
        int nl = sc_.line(), nc = sc_.col();
        sc_.advance();
        parse_body(nested.body, nl, nc);
        body.blocks.push_back(std::move(nested));
        continue;
      }

      sc_.fail_at(item_line, item_col, "expected '=' or '{' after '" + name + "'");
    }
  }

  // Captures the attribute value as text (comments removed), tracking bracket
  // depth so lists, maps and parenthesized expressions can span lines, then
  // attempts a structural parse of the capture.
  Expression capture_expression() {
    sc_.skip_inline_ws();
    int val_line = sc_.line(), val_col = sc_.col();
    std::string raw;
    std::vector<std::array<int, 3>> stack;  // bracket char, line, col

    for (;;) {
      if (sc_.eof()) {
        if (!stack.empty()) {
          sc_.fail_at(stack.back()[1], stack.back()[2], "unclosed bracket in expression");
        }
        break;
      }
      char c = sc_.peek();

      if (c == '\n') {
        if (stack.empty()) break;
        raw.push_back(sc_.advance());
        continue;
      }
      if (c == '#' || (c == '/' && sc_.peek(1) == '/')) {
        if (stack.empty()) break;
        while (!sc_.eof() && sc_.peek() != '\n') sc_.advance();
        continue;
      }
      if (c == '/' && sc_.peek(1) == '*') {
        sc_.skip_block_comment();
        continue;
      }
      if (c == '"') {
        raw += sc_.scan_string().raw;
        continue;
      }
      if (c == '<' && sc_.peek(1) == '<') {
        raw += sc_.scan_heredoc().raw;
        if (stack.empty()) break;  // heredoc ends a top-level value
        continue;
      }
      if (c == '(' || c == '[' || c == '{') {
        stack.push_back({c, sc_.line(), sc_.col()});
        raw.push_back(sc_.advance());
        continue;
      }
      if (c == ')' || c == ']' || c == '}') {
        if (stack.empty()) break;  // '}' closes the enclosing body; strays fail upstream
        char open = static_cast<char>(stack.back()[0]);
        char want = open == '(' ? ')' : open == '[' ? ']' : '}';
        if (c != want) {
          sc_.fail_at(stack.back()[1], stack.back()[2],
                      std::string("mismatched '") + open + "' closed by '" + c + "'");
        }
        stack.pop_back();
        raw.push_back(sc_.advance());
        continue;
      }
      raw.push_back(sc_.advance());
    }

    while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t' || raw.back() == '\r'))
      raw.pop_back();
    if (raw.empty()) {
      sc_.fail_at(val_line, val_col, "missing attribute value");
    }

    ExprParser ep(raw);
    if (auto parsed = ep.parse_full()) return std::move(*parsed);

    Expression opaque;
    opaque.kind = Expression::Kind::Opaque;
    opaque.raw = std::move(raw);
    return opaque;
  }

  Scanner sc_;
};

}  // namespace

Configuration parse_config(std::string_view text) {
  Parser parser(text);
  Configuration config = parser.parse();
  config.source_text = std::string(text);
  config.canonical_hash = util::sha256_hex(canonicalize(config));
  return config;
}

}  // namespace iacforge::hcl
