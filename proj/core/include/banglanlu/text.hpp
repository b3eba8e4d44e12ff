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

// UTF-8 helpers. Every offset in this library is a Unicode code-point
// offset, never a byte offset.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bnlu::text {

/// Decodes UTF-8; throws Error(InvalidUtf8) on malformed input.
std::u32string decode(std::string_view utf8);

std::string encode(std::u32string_view cps);
std::string encode(char32_t cp);

/// Number of code points in a UTF-8 string.
std::size_t length(std::string_view utf8);

/// Substring by code-point range [start, end).
std::string slice(std::string_view utf8, std::size_t start, std::size_t end);

/// Byte offset of every code point plus a trailing entry for the end, so
/// byte_offsets(s)[i] is where code point i starts.
std::vector<std::size_t> byte_offsets(std::string_view utf8);

bool is_space(char32_t cp);
bool is_ascii_punct(char32_t cp);
bool is_danda(char32_t cp);
bool is_zero_width_joiner(char32_t cp);

/// Anything in the Bengali block U+0980..U+09FF.
bool in_bangla_block(char32_t cp);
bool is_bangla_digit(char32_t cp);
/// Bengali-block code points that act as letters (excludes digits and
/// currency/fraction signs).
bool is_bangla_letter(char32_t cp);
bool is_latin_letter(char32_t cp);
bool is_digit(char32_t cp);

/// ASCII case folding; non-ASCII code points are left untouched.
std::string ascii_lower(std::string_view s);

std::string trim(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace bnlu::text
