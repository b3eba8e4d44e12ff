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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bnlu {

/// A token with code-point offsets into the original message.
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class TokenizerKind { Whitespace, BanglaCustom };

std::string_view to_string(TokenizerKind kind);
/// Accepts "whitespace" or "bangla" (also "custom"); throws Error(ConfigError).
TokenizerKind tokenizer_from_string(std::string_view name);

/// Maximal runs of non-whitespace.
std::vector<Token> whitespace_tokenize(std::string_view text);

/// Whitespace split that also detaches ASCII punctuation and the danda
/// marks (U+0964, U+0965) as one-character tokens, and drops ZWNJ/ZWJ from
/// token text while keeping offsets on the original message.
std::vector<Token> bangla_tokenize(std::string_view text);

std::vector<Token> tokenize(TokenizerKind kind, std::string_view text);

}  // namespace bnlu
