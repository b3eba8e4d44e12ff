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

// Reader for the indentation-structured subset of YAML used by the nlu,
// domain and stories files: block mappings, block sequences (including
// mappings nested inside sequence items), plain or quoted scalars, and
// `|` literal block scalars. No anchors, flow style or multi-document
// streams.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bnlu::yaml_lite {

struct Node {
  enum class Kind { Null, Scalar, Map, Seq };

  Kind kind = Kind::Null;
  std::string scalar;
  std::vector<std::pair<std::string, Node>> map;
  std::vector<Node> seq;
  int line = 0;

  bool is_null() const { return kind == Kind::Null; }
  bool is_scalar() const { return kind == Kind::Scalar; }
  bool is_map() const { return kind == Kind::Map; }
  bool is_seq() const { return kind == Kind::Seq; }

  /// Child of a mapping node, or nullptr.
  const Node* find(std::string_view key) const;
};

/// Parses a document. Throws Error(SyntaxError) with the offending line.
Node parse(std::string_view contents);

/// Quotes a scalar for output when plain style would not read back
/// verbatim.
std::string quote_if_needed(std::string_view value);

}  // namespace bnlu::yaml_lite
