// Copyright 2026 The q8s Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "q8s/yaml.hpp"

#include <cstdint>
#include <optional>

namespace q8s::yaml {

Node Node::null(Position pos) {
  Node n;
  n.pos_ = pos;
  return n;
}

Node Node::scalar(std::string value, bool quoted, Position pos) {
  Node n;
  n.kind_ = Kind::Scalar;
  n.value_ = std::move(value);
  n.quoted_ = quoted;
  n.pos_ = pos;
  return n;
}

Node Node::sequence(std::vector<Node> items, bool flow) {
  Node n;
  n.kind_ = Kind::Sequence;
  n.items_ = std::move(items);
  n.flow_ = flow;
  return n;
}

Node Node::mapping() {
  Node n;
  n.kind_ = Kind::Mapping;
  return n;
}

const Node::Entry* Node::find_entry(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const Node* Node::find(std::string_view key) const {
  const Entry* e = find_entry(key);
  return e ? &e->value : nullptr;
}

void Node::set(std::string key, Node value, Position key_pos) {
  entries_.push_back(Entry{std::move(key), key_pos, std::move(value)});
}

namespace {

[[noreturn]] void fail(Position pos, const std::string& message) {
  throw PositionedError("SyntaxError", pos, message);
}

struct Line {
  int indent = 0;
  std::string text;  // content after indentation, comment stripped, right-trimmed
  int number = 0;
  int column = 1;  // 1-based column of text[0]
};

bool opens_quote(std::string_view s, size_t i) {
  if (s[i] != '"' && s[i] != '\'') return false;
  if (i == 0) return true;
  char prev = s[i - 1];
  return prev == ' ' || prev == '[' || prev == '{' || prev == ',';
}

// Returns the index just past the closing quote of the quoted scalar at `i`,
// or npos when unterminated.
size_t skip_quoted(std::string_view s, size_t i) {
  char q = s[i];
  for (size_t j = i + 1; j < s.size(); ++j) {
    if (q == '"' && s[j] == '\\') {
      ++j;
      continue;
    }
    if (s[j] == q) {
      if (q == '\'' && j + 1 < s.size() && s[j + 1] == '\'') {
        ++j;
        continue;
      }
      return j + 1;
    }
  }
  return std::string_view::npos;
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return rtrim(s);
}

std::string strip_comment(std::string_view s, Position pos) {
  for (size_t i = 0; i < s.size(); ++i) {
    if (opens_quote(s, i)) {
      size_t end = skip_quoted(s, i);
      if (end == std::string_view::npos) {
        fail({pos.line, pos.column + static_cast<int>(i)}, "unterminated quoted scalar");
      }
      i = end - 1;
      continue;
    }
    if (s[i] == '#' && (i == 0 || s[i - 1] == ' ')) return std::string(rtrim(s.substr(0, i)));
  }
  return std::string(rtrim(s));
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

Node parse_quoted(std::string_view s, Position pos) {
  size_t end = skip_quoted(s, 0);
  if (end == std::string_view::npos) fail(pos, "unterminated quoted scalar");
  if (end != s.size()) {
    fail({pos.line, pos.column + static_cast<int>(end)}, "unexpected characters after quoted scalar");
  }
  std::string out;
  std::string_view body = s.substr(1, s.size() - 2);
  if (s[0] == '\'') {
    for (size_t i = 0; i < body.size(); ++i) {
      out.push_back(body[i]);
      if (body[i] == '\'') ++i;
    }
    return Node::scalar(std::move(out), true, pos);
  }
  for (size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '\\') {
      out.push_back(body[i]);
      continue;
    }
    Position at{pos.line, pos.column + 1 + static_cast<int>(i)};
    if (++i >= body.size()) fail(at, "dangling escape");
    switch (body[i]) {
      case '\\': out.push_back('\\'); break;
      case '"': out.push_back('"'); break;
      case '/': out.push_back('/'); break;
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case 'r': out.push_back('\r'); break;
      case '0': out.push_back('\0'); break;
      case 'x':
      case 'u': {
        size_t width = body[i] == 'x' ? 2 : 4;
        uint32_t cp = 0;
        for (size_t k = 1; k <= width; ++k) {
          if (i + k >= body.size()) fail(at, "short escape");
          char c = body[i + k];
          cp <<= 4;
          if (c >= '0' && c <= '9') cp |= static_cast<uint32_t>(c - '0');
          else if (c >= 'a' && c <= 'f') cp |= static_cast<uint32_t>(c - 'a' + 10);
          else if (c >= 'A' && c <= 'F') cp |= static_cast<uint32_t>(c - 'A' + 10);
          else fail(at, "bad hex digit in escape");
        }
        append_utf8(out, cp);
        i += width;
        break;
      }
      default: fail(at, std::string("unknown escape '\\") + body[i] + "'");
    }
  }
  return Node::scalar(std::move(out), true, pos);
}

Node parse_plain(std::string_view s, Position pos) {
  if (s.empty()) return Node::null(pos);
  char c = s.front();
  switch (c) {
    case '&': fail(pos, "anchors are not supported");
    case '*': fail(pos, "aliases are not supported");
    case '!': fail(pos, "tags are not supported");
    case '|':
    case '>': fail(pos, "block scalars are not supported");
    case '%':
    case '@':
    case '`': fail(pos, std::string("reserved indicator '") + c + "'");
    case ']':
    case '}': fail(pos, std::string("unexpected '") + c + "'");
    default: break;
  }
  if (s == "-" || s.substr(0, 2) == "- ") fail(pos, "block sequence entries are not allowed here");
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ':' && (i + 1 == s.size() || s[i + 1] == ' ')) {
      fail({pos.line, pos.column + static_cast<int>(i)}, "mapping values are not allowed here");
    }
  }
  return Node::scalar(std::string(s), false, pos);
}

Node parse_flow_scalar(std::string_view s, Position pos) {
  if (s.empty()) fail(pos, "empty entry in flow collection");
  if (s.front() == '[' || s.front() == '{') fail(pos, "nested flow collections are not supported");
  if (s.front() == '"' || s.front() == '\'') return parse_quoted(s, pos);
  for (char c : s) {
    if (c == '[' || c == ']' || c == '{' || c == '}') fail(pos, "unexpected bracket in flow scalar");
  }
  return parse_plain(s, pos);
}

// Splits `s` on top-level commas; returns (offset, piece) pairs.
std::vector<std::pair<size_t, std::string_view>> split_flow(std::string_view s, Position pos) {
  std::vector<std::pair<size_t, std::string_view>> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && opens_quote(s, i)) {
      size_t end = skip_quoted(s, i);
      if (end == std::string_view::npos) fail(pos, "unterminated quoted scalar");
      i = end - 1;
      continue;
    }
    if (i == s.size() || s[i] == ',') {
      std::string_view piece = s.substr(start, i - start);
      size_t lead = 0;
      while (lead < piece.size() && piece[lead] == ' ') ++lead;
      out.emplace_back(start + lead, rtrim(piece.substr(lead)));
      start = i + 1;
    }
  }
  return out;
}

// Index of the `:` separating key from value, or npos.
size_t find_key_colon(std::string_view s) {
  size_t i = 0;
  if (!s.empty() && (s[0] == '"' || s[0] == '\'')) {
    i = skip_quoted(s, 0);
    if (i == std::string_view::npos) return std::string_view::npos;
  }
  for (; i < s.size(); ++i) {
    if (s[i] == ':' && (i + 1 == s.size() || s[i + 1] == ' ')) return i;
  }
  return std::string_view::npos;
}

std::string parse_key(std::string_view raw, Position pos) {
  if (raw.empty()) fail(pos, "empty mapping key");
  if (raw.front() == '"' || raw.front() == '\'') return parse_quoted(raw, pos).value();
  if (raw.front() == '?') fail(pos, "complex mapping keys are not supported");
  if (raw.front() == '[' || raw.front() == '{') fail(pos, "flow collections as keys are not supported");
  Node n = parse_plain(raw, pos);
  return n.value();
}

Node parse_flow_sequence(std::string_view s, Position pos) {
  if (s.back() != ']') fail(pos, "unterminated flow sequence");
  std::string_view body = s.substr(1, s.size() - 2);
  Node seq = Node::sequence({}, true);
  seq.set_position(pos);
  if (trim(body).empty()) return seq;
  for (auto [off, piece] : split_flow(body, pos)) {
    seq.push_back(parse_flow_scalar(piece, {pos.line, pos.column + 1 + static_cast<int>(off)}));
  }
  return seq;
}

Node parse_flow_mapping(std::string_view s, Position pos) {
  if (s.back() != '}') fail(pos, "unterminated flow mapping");
  std::string_view body = s.substr(1, s.size() - 2);
  Node map = Node::mapping();
  map.set_position(pos);
  if (trim(body).empty()) return map;
  for (auto [off, piece] : split_flow(body, pos)) {
    Position at{pos.line, pos.column + 1 + static_cast<int>(off)};
    size_t colon = find_key_colon(piece);
    if (colon == std::string_view::npos) fail(at, "expected 'key: value' in flow mapping");
    std::string key = parse_key(rtrim(piece.substr(0, colon)), at);
    if (map.find(key)) fail(at, "duplicate key '" + key + "'");
    std::string_view rest = piece.substr(colon + 1);
    size_t lead = 0;
    while (lead < rest.size() && rest[lead] == ' ') ++lead;
    Position vpos{at.line, at.column + static_cast<int>(colon + 1 + lead)};
    rest = rest.substr(lead);
    map.set(std::move(key), rest.empty() ? Node::null(vpos) : parse_flow_scalar(rest, vpos), at);
  }
  return map;
}

Node parse_inline(std::string_view s, Position pos) {
  if (s.empty()) return Node::null(pos);
  if (s.front() == '[') return parse_flow_sequence(s, pos);
  if (s.front() == '{') return parse_flow_mapping(s, pos);
  if (s.front() == '"' || s.front() == '\'') return parse_quoted(s, pos);
  return parse_plain(s, pos);
}

bool is_seq_item(const std::string& text) {
  return text == "-" || text.rfind("- ", 0) == 0;
}

class BlockParser {
 public:
  explicit BlockParser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  Node parse_document() {
    Node root = parse_block(lines_.front().indent);
    if (pos_ < lines_.size()) fail(at(pos_), "unexpected content (check indentation)");
    return root;
  }

 private:
  Position at(size_t i) const { return {lines_[i].number, lines_[i].column}; }

  bool done() const { return pos_ >= lines_.size(); }

  Node parse_block(int indent) {
    const Line& line = lines_[pos_];
    if (is_seq_item(line.text)) return parse_sequence(indent);
    if (find_key_colon(line.text) != std::string::npos &&
        line.text.front() != '[' && line.text.front() != '{') {
      return parse_mapping(indent);
    }
    Node n = parse_inline(line.text, at(pos_));
    ++pos_;
    return n;
  }

  Node parse_mapping(int indent) {
    Node map = Node::mapping();
    map.set_position(at(pos_));
    while (!done()) {
      const Line& line = lines_[pos_];
      if (line.indent < indent) break;
      if (line.indent > indent) fail(at(pos_), "unexpected indentation");
      if (is_seq_item(line.text)) break;
      size_t colon = find_key_colon(line.text);
      if (colon == std::string::npos) fail(at(pos_), "expected 'key: value'");
      Position key_pos = at(pos_);
      std::string key = parse_key(rtrim(std::string_view(line.text).substr(0, colon)), key_pos);
      if (map.find(key)) fail(key_pos, "duplicate key '" + key + "'");
      std::string_view rest = std::string_view(line.text).substr(colon + 1);
      size_t lead = 0;
      while (lead < rest.size() && rest[lead] == ' ') ++lead;
      rest = rest.substr(lead);
      Position value_pos{line.number, line.column + static_cast<int>(colon + 1 + lead)};
      if (!rest.empty()) {
        Node value = parse_inline(rest, value_pos);
        ++pos_;
        map.set(std::move(key), std::move(value), key_pos);
        continue;
      }
      ++pos_;
      if (!done() && lines_[pos_].indent > indent) {
        map.set(std::move(key), parse_block(lines_[pos_].indent), key_pos);
      } else if (!done() && lines_[pos_].indent == indent && is_seq_item(lines_[pos_].text)) {
        map.set(std::move(key), parse_sequence(indent), key_pos);
      } else {
        map.set(std::move(key), Node::null(value_pos), key_pos);
      }
    }
    return map;
  }

  Node parse_sequence(int indent) {
    Node seq = Node::sequence();
    seq.set_position(at(pos_));
    while (!done()) {
      Line& line = lines_[pos_];
      if (line.indent < indent) break;
      if (line.indent > indent) fail(at(pos_), "unexpected indentation");
      if (!is_seq_item(line.text)) break;
      size_t off = 1;
      while (off < line.text.size() && line.text[off] == ' ') ++off;
      if (off >= line.text.size()) {
        Position item_pos = at(pos_);
        ++pos_;
        if (!done() && lines_[pos_].indent > indent) {
          seq.push_back(parse_block(lines_[pos_].indent));
        } else {
          seq.push_back(Node::null(item_pos));
        }
        continue;
      }
      // Re-read the remainder of the line as if it started its own block.
      line.indent += static_cast<int>(off);
      line.column += static_cast<int>(off);
      line.text.erase(0, off);
      seq.push_back(parse_block(line.indent));
    }
    return seq;
  }

  std::vector<Line> lines_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<Node> parse_stream(std::string_view text) {
  std::vector<Node> docs;
  std::vector<Line> current;
  auto flush = [&] {
    if (!current.empty()) docs.push_back(BlockParser(std::move(current)).parse_document());
    current.clear();
  };

  int number = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++number;
    start = end + 1;

    size_t indent = 0;
    while (indent < raw.size() && raw[indent] == ' ') ++indent;
    if (indent < raw.size() && raw[indent] == '\t') {
      fail({number, static_cast<int>(indent) + 1}, "tabs are not allowed for indentation");
    }
    Position pos{number, static_cast<int>(indent) + 1};
    std::string content = strip_comment(raw.substr(indent), pos);
    if (content.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (indent == 0 && (content == "---" || content.rfind("--- ", 0) == 0)) {
      if (content != "---") fail(pos, "content after document marker is not supported");
      flush();
    } else if (indent == 0 && content == "...") {
      fail(pos, "document end markers are not supported");
    } else if (indent == 0 && content.front() == '%') {
      fail(pos, "directives are not supported");
    } else {
      current.push_back(Line{static_cast<int>(indent), std::move(content), number, pos.column});
    }
    if (end == text.size()) break;
  }
  flush();
  return docs;
}

namespace {

bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  static const std::string_view kIndicators = "-?:,[]{}#&*!|>'\"%@`";
  if (kIndicators.find(s.front()) != std::string_view::npos) return true;
  if (s.front() == ' ' || s.back() == ' ' || s.back() == ':') return true;
  if (s.find(": ") != std::string::npos || s.find(" #") != std::string::npos) return true;
  if (s.find_first_of("'\"") != std::string::npos) return true;
  for (unsigned char c : s) {
    if (c < 0x20 || c == 0x7F) return true;
  }
  return false;
}

std::string double_quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          static const char* kHex = "0123456789abcdef";
          out += "\\x";
          out.push_back(kHex[c >> 4]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string scalar_text(const Node& n) {
  if (n.is_null()) return "";
  return needs_quotes(n.value()) ? double_quote(n.value()) : n.value();
}

std::string key_text(const std::string& key) {
  return needs_quotes(key) ? double_quote(key) : key;
}

std::string inline_text(const Node& n) {
  if (n.is_sequence()) {
    std::string out = "[";
    for (size_t i = 0; i < n.items().size(); ++i) {
      if (i) out += ", ";
      out += double_quote(n.items()[i].value());
    }
    return out + "]";
  }
  if (n.is_mapping()) {
    std::string out = "{";
    for (size_t i = 0; i < n.entries().size(); ++i) {
      if (i) out += ", ";
      out += key_text(n.entries()[i].key) + ": " + scalar_text(n.entries()[i].value);
    }
    return out + "}";
  }
  return scalar_text(n);
}

bool emits_inline(const Node& n) {
  if (n.is_sequence()) return n.flow() || n.items().empty();
  if (n.is_mapping()) return n.entries().empty();
  return true;
}

void emit_block(const Node& n, int indent, std::string& out);

void emit_mapping_entries(const Node& n, int indent, bool first_inline, std::string& out) {
  std::string pad(static_cast<size_t>(indent), ' ');
  bool first = true;
  for (const auto& e : n.entries()) {
    if (!(first && first_inline)) out += pad;
    first = false;
    out += key_text(e.key) + ":";
    if (emits_inline(e.value)) {
      std::string v = inline_text(e.value);
      if (!v.empty()) out += " " + v;
      out += "\n";
    } else {
      out += "\n";
      emit_block(e.value, indent + 2, out);
    }
  }
}

void emit_block(const Node& n, int indent, std::string& out) {
  std::string pad(static_cast<size_t>(indent), ' ');
  if (n.is_mapping()) {
    emit_mapping_entries(n, indent, false, out);
    return;
  }
  if (n.is_sequence()) {
    for (const auto& item : n.items()) {
      out += pad + "-";
      if (item.is_mapping() && !item.entries().empty()) {
        out += " ";
        emit_mapping_entries(item, indent + 2, true, out);
      } else if (emits_inline(item)) {
        std::string v = inline_text(item);
        out += (v.empty() ? "" : " " + v) + "\n";
      } else {
        out += "\n";
        emit_block(item, indent + 2, out);
      }
    }
    return;
  }
  out += pad + inline_text(n) + "\n";
}

}  // namespace

std::string emit(const Node& doc) {
  std::string out;
  emit_block(doc, 0, out);
  return out;
}

}  // namespace q8s::yaml
