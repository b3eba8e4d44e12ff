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

// Post-classification steps: entity synonym mapping and the
// threshold/ambiguity fallback.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "banglanlu/corpus.hpp"
#include "banglanlu/diet.hpp"

namespace bnlu {

struct FallbackConfig {
  double threshold = 0.3;
  double ambiguity_threshold = 0.1;
  std::string fallback_intent_name = std::string(kDefaultFallbackIntent);

  /// Throws Error(ConfigError) unless both thresholds lie in [0, 1].
  void validate() const;
};

enum class FallbackReason { None, Threshold, Ambiguity };

std::string_view to_string(FallbackReason reason);

/// Which rule, if any, would fire on this ranking.
FallbackReason fallback_reason(const IntentRanking& ranking, const FallbackConfig& config);

/// Prepends the fallback intent, carrying the displaced top confidence,
/// when the top score is too low or too close to the runner-up.
IntentRanking apply_fallback(IntentRanking ranking, const FallbackConfig& config);

/// Case-folded surface -> canonical value. Every canonical value maps to
/// itself, so lookups are idempotent.
class SynonymTable {
 public:
  SynonymTable() = default;
  explicit SynonymTable(const std::map<std::string, std::string>& synonyms);

  void add(std::string_view surface, const std::string& canonical);
  /// Canonical value for `value`, or nullptr when unmapped.
  const std::string* lookup(std::string_view value) const;

  const std::map<std::string, std::string>& entries() const { return table_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::string, std::string> table_;
};

std::vector<EntitySpan> map_synonyms(std::vector<EntitySpan> entities, const SynonymTable& table);

}  // namespace bnlu
