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

// Training data model: NLU examples with inline entity markup, the bot
// domain, and dialogue stories, plus the stratified train/test split and
// the synthetic corpus generator used as the evaluation substrate.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bnlu {

/// An annotated entity. Offsets are code points into the example text,
/// end exclusive.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string entity;
  std::string value;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

struct TrainingExample {
  std::string text;
  std::string intent;
  std::vector<EntitySpan> entities;

  friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

struct TrainingSet {
  /// Grouped by intent in `intents` order, file order within an intent.
  std::vector<TrainingExample> examples;
  /// Sorted, unique.
  std::vector<std::string> intents;
  /// Sorted, unique.
  std::vector<std::string> entity_types;
  /// Surface string -> canonical value, as written in the file.
  std::map<std::string, std::string> synonyms;

  friend bool operator==(const TrainingSet&, const TrainingSet&) = default;
};

struct Domain {
  std::map<std::string, std::vector<std::string>> responses;
  /// Sorted union of response names and declared custom actions.
  std::vector<std::string> actions;
  std::vector<std::string> intents;
  std::vector<std::string> entity_types;

  bool has_action(std::string_view name) const;
};

struct StoryStep {
  enum class Kind { User, Action };

  Kind kind = Kind::User;
  /// Intent name for user steps, action name for bot steps.
  std::string name;
  /// Entity types expected on a user step (optional constraint).
  std::vector<std::string> entities;

  bool is_user() const { return kind == Kind::User; }
  friend bool operator==(const StoryStep&, const StoryStep&) = default;
};

struct Story {
  std::string name;
  std::vector<StoryStep> steps;
};

struct StorySet {
  std::vector<Story> stories;
  std::vector<Story> rules;
};

inline constexpr std::string_view kActionListen = "action_listen";
inline constexpr std::string_view kActionDefaultFallback = "action_default_fallback";
inline constexpr std::string_view kDefaultFallbackIntent = "nlu_fallback";

struct MarkupParse {
  std::string text;
  std::vector<EntitySpan> spans;
};

/// Strips `[surface](entity)` annotations. Throws Error(UnbalancedMarkup),
/// Error(EmptyEntityName) or Error(EmptyEntitySurface).
MarkupParse parse_entity_markup(std::string_view raw);

/// Re-inserts annotations; inverse of parse_entity_markup for valid spans.
std::string render_entity_markup(const TrainingExample& example);

TrainingSet parse_nlu_file(std::string_view contents);
std::string serialize_nlu(const TrainingSet& ts);

Domain parse_domain_file(std::string_view contents);
std::string serialize_domain(const Domain& domain);

/// Parses stories and rules, cross-checking intents against the training
/// set and actions against the domain.
StorySet parse_stories_file(std::string_view contents, const Domain& domain,
                            const TrainingSet& ts);
std::string serialize_stories(const StorySet& stories);

struct TrainTestSplit {
  TrainingSet train;
  TrainingSet test;
};

/// Stratified per-intent split: max(1, floor(n * test_fraction)) examples
/// of each intent go to test, picked by a seeded shuffle.
TrainTestSplit split_train_test(const TrainingSet& ts, double test_fraction,
                                std::uint64_t seed);

/// Order-sensitive fingerprint of a split, recorded with ablation rows to
/// prove every pipeline saw the same data.
std::uint64_t split_fingerprint(const TrainTestSplit& split);

struct SyntheticCorpus {
  std::string nlu;
  std::string domain;
  std::string stories;
};

/// Deterministic templated corpus of Bangla-script and Latin-transliterated
/// utterances. Each intent owns its own keywords, so the intents are
/// separable by construction.
SyntheticCorpus generate_synthetic_corpus(std::uint64_t seed, std::size_t n_intents,
                                          std::size_t examples_per_intent,
                                          std::size_t n_entity_types);

/// All three files parsed and cross-referenced, as `train` and
/// `data-validate` see them.
struct Project {
  TrainingSet nlu;
  Domain domain;
  StorySet stories;
};

Project load_project(std::string_view nlu_contents, std::string_view domain_contents,
                     std::string_view stories_contents);

/// Reads `nlu.yml`, `domain.yml` and `stories.yml` from a directory.
Project load_project_dir(const std::string& dir);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace bnlu
