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

#include "banglanlu/tokenize.hpp"

#include "banglanlu/errors.hpp"
#include "banglanlu/text.hpp"

namespace bnlu {

std::string_view to_string(TokenizerKind kind) {
  switch (kind) {
    case TokenizerKind::Whitespace: return "whitespace";
    case TokenizerKind::BanglaCustom: return "bangla";
  }
  return "whitespace";
}

TokenizerKind tokenizer_from_string(std::string_view name) {
  if (name == "whitespace") return TokenizerKind::Whitespace;
  if (name == "bangla" || name == "custom") return TokenizerKind::BanglaCustom;
  throw Error(ErrorCode::ConfigError, "unknown tokenizer `" + std::string(name) + "`");
}

std::vector<Token> whitespace_tokenize(std::string_view text) {
  const std::u32string cps = text::decode(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (text::is_space(cps[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < cps.size() && !text::is_space(cps[i])) ++i;
    tokens.push_back({text::encode(std::u32string_view(cps).substr(start, i - start)), start, i});
  }
  return tokens;
}

namespace {

bool is_detached(char32_t cp) { return text::is_ascii_punct(cp) || text::is_danda(cp); }

// Emits cps[start, end) as a token with joiners removed; the offsets are
// narrowed so they begin and end on visible characters.
void emit_word(const std::u32string& cps, std::size_t start, std::size_t end,
               std::vector<Token>& out) {
  while (start < end && text::is_zero_width_joiner(cps[start])) ++start;
  while (end > start && text::is_zero_width_joiner(cps[end - 1])) --end;
  if (start == end) return;
  std::u32string visible;
  for (std::size_t i = start; i < end; ++i) {
    if (!text::is_zero_width_joiner(cps[i])) visible.push_back(cps[i]);
  }
  out.push_back({text::encode(visible), start, end});
}

}  // namespace

std::vector<Token> bangla_tokenize(std::string_view text) {
  const std::u32string cps = text::decode(text);
  std::vector<Token> tokens;
  std::size_t word_start = 0;
  bool in_word = false;
  for (std::size_t i = 0; i <= cps.size(); ++i) {
    const bool at_end = i == cps.size();
    if (at_end || text::is_space(cps[i]) || is_detached(cps[i])) {
      if (in_word) emit_word(cps, word_start, i, tokens);
      in_word = false;
      if (!at_end && is_detached(cps[i])) {
        tokens.push_back({text::encode(cps[i]), i, i + 1});
      }
      continue;
    }
    if (!in_word) {
      word_start = i;
      in_word = true;
    }
  }
  return tokens;
}

std::vector<Token> tokenize(TokenizerKind kind, std::string_view text) {
  return kind == TokenizerKind::Whitespace ? whitespace_tokenize(text) : bangla_tokenize(text);
}

}  // namespace bnlu
