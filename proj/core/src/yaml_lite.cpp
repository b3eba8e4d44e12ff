// Copyright 2026 The banglanlu Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "yaml_lite.hpp"

#include <cstddef>

#include "banglanlu/errors.hpp"
#include "banglanlu/text.hpp"

namespace bnlu::yaml_lite {

namespace {

struct Line {
  int number = 0;
  std::size_t indent = 0;
  std::string content;
  // Set when the line is `key: |`; holds the literal block text.
  bool has_block = false;
  std::string block;
};

[[noreturn]] void syntax_error(int line, const std::string& what) {
  throw Error(ErrorCode::SyntaxError,
              "line " + std::to_string(line) + ": " + what);
}

std::size_t leading_spaces(std::string_view raw, int number) {
  std::size_t n = 0;
  while (n < raw.size() && raw[n] == ' ') ++n;
  if (n < raw.size() && raw[n] == '\t') syntax_error(number, "tab indentation");
  return n;
}

bool is_blank(std::string_view raw) {
  for (char c : raw) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

bool ends_with_block_marker(std::string_view content) {
  return content.ends_with(": |") || content.ends_with(": |-") ||
         content == "|" || content == "|-";
}

std::vector<Line> split_lines(std::string_view contents) {
  std::vector<std::string_view> raw;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    const std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < contents.size()) raw.push_back(contents.substr(pos));
      break;
    }
    raw.push_back(contents.substr(pos, nl - pos));
    pos = nl + 1;
  }

  std::vector<Line> lines;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string_view r = raw[i];
    if (!r.empty() && r.back() == '\r') r.remove_suffix(1);
    const int number = static_cast<int>(i) + 1;
    if (is_blank(r)) continue;
    const std::size_t indent = leading_spaces(r, number);
    std::string content = text::trim(r.substr(indent));
    if (content.starts_with("#")) continue;
    if (content == "---") {
      if (lines.empty()) continue;
      syntax_error(number, "multi-document streams are not supported");
    }
    Line line{number, indent, content, false, {}};
    if (ends_with_block_marker(content)) {
      const bool strip = content.ends_with("-");
      line.content = text::trim(content.substr(0, content.rfind('|')));
      line.has_block = true;
      // A block belongs to the line whose item starts it: for `- key: |`
      // the owner column is the key's column.
      std::size_t owner = indent;
      if (content.starts_with("- ")) owner = indent + 2;
      std::vector<std::string_view> body;
      std::size_t j = i + 1;
      std::size_t block_indent = std::string_view::npos;
      for (; j < raw.size(); ++j) {
        std::string_view b = raw[j];
        if (!b.empty() && b.back() == '\r') b.remove_suffix(1);
        if (is_blank(b)) {
          body.push_back({});
          continue;
        }
        const std::size_t bi = leading_spaces(b, static_cast<int>(j) + 1);
        if (bi <= owner) break;
        if (block_indent == std::string_view::npos) block_indent = bi;
        if (bi < block_indent) {
          syntax_error(static_cast<int>(j) + 1, "inconsistent block indentation");
        }
        body.push_back(b);
      }
      while (!body.empty() && body.back().empty()) body.pop_back();
      for (auto b : body) {
        if (!b.empty()) line.block += std::string(b.substr(block_indent));
        line.block += '\n';
      }
      if (strip && !line.block.empty()) line.block.pop_back();
      i = j - 1;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string unquote(std::string_view v, int line) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) {
        const char e = v[++i];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: syntax_error(line, std::string("unknown escape \\") + e);
        }
      } else {
        out += v[i];
      }
    }
    return out;
  }
  if (v.size() >= 2 && v.front() == '\'' && v.back() == '\'') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      out += v[i];
      if (v[i] == '\'' && i + 2 < v.size() && v[i + 1] == '\'') ++i;
    }
    return out;
  }
  if (!v.empty() && (v.front() == '"' || v.front() == '\'')) {
    syntax_error(line, "unterminated quoted scalar");
  }
  return std::string(v);
}

// Splits `key: value` / `key:`; returns false when the content is not a
// mapping entry.
bool split_key(std::string_view content, std::string& key, std::string& value) {
  if (content.empty() || content.front() == '"' || content.front() == '\'') {
    return false;
  }
  std::size_t colon = std::string_view::npos;
  for (std::size_t i = 0; i < content.size(); ++i) {
    if (content[i] == ':' && (i + 1 == content.size() || content[i + 1] == ' ')) {
      colon = i;
      break;
    }
  }
  if (colon == std::string_view::npos || colon == 0) return false;
  key = text::trim(content.substr(0, colon));
  if (key.find(' ') != std::string::npos) return false;
  value = text::trim(content.substr(colon + 1));
  return true;
}

bool is_seq_item(const Line& l) {
  return l.content == "-" || l.content.starts_with("- ");
}

class Parser {
 public:
  explicit Parser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  Node parse_document() {
    if (lines_.empty()) return Node{};
    if (lines_.front().indent != 0) {
      syntax_error(lines_.front().number, "document must start at column 0");
    }
    Node root = parse_block(0);
    if (pos_ < lines_.size()) {
      syntax_error(lines_[pos_].number, "unexpected indentation");
    }
    return root;
  }

 private:
  Node parse_block(std::size_t indent) {
    if (is_seq_item(lines_[pos_])) return parse_seq(indent);
    return parse_map(indent);
  }

  Node scalar_node(const Line& l, std::string_view value) {
    Node n;
    n.line = l.number;
    if (l.has_block) {
      n.kind = Node::Kind::Scalar;
      n.scalar = l.block;
      return n;
    }
    n.kind = Node::Kind::Scalar;
    n.scalar = unquote(value, l.number);
    return n;
  }

  // Value of `key:` with nothing after the colon: a nested block, a
  // sequence at the same indentation, or null.
  Node nested_value(std::size_t indent, int line_number) {
    if (pos_ < lines_.size()) {
      const Line& next = lines_[pos_];
      if (next.indent > indent) return parse_block(next.indent);
      if (next.indent == indent && is_seq_item(next)) return parse_seq(indent);
    }
    Node n;
    n.line = line_number;
    return n;
  }

  Node parse_map(std::size_t indent) {
    Node node;
    node.kind = Node::Kind::Map;
    node.line = lines_[pos_].number;
    while (pos_ < lines_.size() && lines_[pos_].indent == indent &&
           !is_seq_item(lines_[pos_])) {
      const Line line = lines_[pos_];
      std::string key;
      std::string value;
      if (!split_key(line.content, key, value)) {
        syntax_error(line.number, "expected `key: value`");
      }
      for (const auto& [k, _] : node.map) {
        if (k == key) syntax_error(line.number, "duplicate key `" + key + "`");
      }
      ++pos_;
      if (line.has_block || !value.empty()) {
        node.map.emplace_back(key, scalar_node(line, value));
      } else {
        node.map.emplace_back(key, nested_value(indent, line.number));
      }
    }
    if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
      syntax_error(lines_[pos_].number, "unexpected indentation");
    }
    return node;
  }

  Node parse_seq(std::size_t indent) {
    Node node;
    node.kind = Node::Kind::Seq;
    node.line = lines_[pos_].number;
    while (pos_ < lines_.size() && lines_[pos_].indent == indent &&
           is_seq_item(lines_[pos_])) {
      Line& line = lines_[pos_];
      if (line.content == "-") {
        ++pos_;
        if (pos_ < lines_.size() && lines_[pos_].indent > indent) {
          node.seq.push_back(parse_block(lines_[pos_].indent));
        } else {
          Node empty;
          empty.line = line.number;
          node.seq.push_back(empty);
        }
        continue;
      }
      std::size_t skip = 1;
      while (skip < line.content.size() && line.content[skip] == ' ') ++skip;
      const std::string rest = line.content.substr(skip);
      std::string key;
      std::string value;
      if (split_key(rest, key, value) || rest.starts_with("- ")) {
        // The item is itself a mapping (or sequence) whose first entry
        // shares the dash's line; re-home it at the content column.
        line.content = rest;
        line.indent = indent + 1 + (skip - 1);
        node.seq.push_back(parse_block(line.indent));
      } else {
        ++pos_;
        node.seq.push_back(scalar_node(line, rest));
      }
    }
    return node;
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

const Node* Node::find(std::string_view key) const {
  for (const auto& [k, v] : map) {
    if (k == key) return &v;
  }
  return nullptr;
}

Node parse(std::string_view contents) {
  Parser parser(split_lines(contents));
  return parser.parse_document();
}

std::string quote_if_needed(std::string_view value) {
  bool needs = value.empty() || value.front() == ' ' || value.back() == ' ' ||
               value.front() == '"' || value.front() == '\'' ||
               value.front() == '#' || value.front() == '|' ||
               value.starts_with("- ") || value == "-" ||
               value.find(": ") != std::string_view::npos || value.ends_with(":") ||
               value.find('\n') != std::string_view::npos ||
               value.find('\t') != std::string_view::npos;
  if (!needs) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

}  // namespace bnlu::yaml_lite
