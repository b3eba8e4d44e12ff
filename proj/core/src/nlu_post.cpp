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

#include "banglanlu/nlu_post.hpp"

#include "banglanlu/errors.hpp"
#include "banglanlu/text.hpp"

namespace bnlu {

void FallbackConfig::validate() const {
  const auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(threshold) || !in_unit(ambiguity_threshold)) {
    throw Error(ErrorCode::ConfigError, "fallback thresholds must lie in [0, 1]");
  }
  if (fallback_intent_name.empty()) {
    throw Error(ErrorCode::ConfigError, "fallback intent name is empty");
  }
}

std::string_view to_string(FallbackReason reason) {
  switch (reason) {
    case FallbackReason::None: return "none";
    case FallbackReason::Threshold: return "threshold";
    case FallbackReason::Ambiguity: return "ambiguity";
  }
  return "none";
}

FallbackReason fallback_reason(const IntentRanking& ranking, const FallbackConfig& config) {
  if (ranking.empty()) return FallbackReason::Threshold;
  if (ranking[0].confidence < config.threshold) return FallbackReason::Threshold;
  if (ranking.size() >= 2 &&
      ranking[0].confidence - ranking[1].confidence < config.ambiguity_threshold) {
    return FallbackReason::Ambiguity;
  }
  return FallbackReason::None;
}

IntentRanking apply_fallback(IntentRanking ranking, const FallbackConfig& config) {
  if (fallback_reason(ranking, config) == FallbackReason::None) return ranking;
  const double top = ranking.empty() ? 0.0 : ranking[0].confidence;
  ranking.insert(ranking.begin(), IntentScore{config.fallback_intent_name, top});
  return ranking;
}

SynonymTable::SynonymTable(const std::map<std::string, std::string>& synonyms) {
  for (const auto& [surface, canonical] : synonyms) add(surface, canonical);
}

void SynonymTable::add(std::string_view surface, const std::string& canonical_value) {
  // A canonical value that is itself mapped resolves through the table.
  std::string canonical = canonical_value;
  if (const auto it = table_.find(text::ascii_lower(canonical)); it != table_.end()) {
    canonical = it->second;
  }
  const std::string key = text::ascii_lower(surface);
  const std::string canonical_key = text::ascii_lower(canonical);
  // Anything that resolved to `surface`, or to a case variant of the
  // canonical value, now resolves to the canonical value.
  for (auto& [k, v] : table_) {
    const std::string folded = text::ascii_lower(v);
    if (folded == key || folded == canonical_key) v = canonical;
  }
  table_[key] = canonical;
  table_[canonical_key] = canonical;
}

const std::string* SynonymTable::lookup(std::string_view value) const {
  const auto it = table_.find(text::ascii_lower(value));
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<EntitySpan> map_synonyms(std::vector<EntitySpan> entities, const SynonymTable& table) {
  for (EntitySpan& span : entities) {
    if (const std::string* canonical = table.lookup(span.value)) span.value = *canonical;
  }
  return entities;
}

}  // namespace bnlu
