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

// Declarative NLU pipelines: a tokenizer, an ordered featurizer list, the
// joint classifier and optional post-processing, loaded from flat
// key=value files. Eight presets ship compiled in.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "banglanlu/corpus.hpp"
#include "banglanlu/diet.hpp"
#include "banglanlu/featurize.hpp"
#include "banglanlu/nlu_post.hpp"
#include "banglanlu/tokenize.hpp"

namespace bnlu {

enum class FeaturizerKind { Regex, LexicalSyntactic, CountVector, Dense };

std::string_view to_string(FeaturizerKind kind);

enum class DenseSourceKind { Auto, Hashed, Pretrained };

struct CountVectorParams {
  Analyzer analyzer = Analyzer::CharWb;
  std::size_t min_ngram = 1;
  std::size_t max_ngram = 4;
};

struct DenseParams {
  DenseSourceKind source = DenseSourceKind::Auto;
  std::size_t dim = 128;
  std::uint64_t seed = 7;
  std::string label;
  /// Word-vector file; `auto` uses it when set and hashing otherwise.
  std::string vectors_path;
};

/// Table II figures in percent; carried as metadata only.
struct ReferenceMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct PipelineConfig {
  std::string name;
  TokenizerKind tokenizer = TokenizerKind::Whitespace;
  std::vector<FeaturizerKind> featurizers;
  CountVectorParams count_vector;
  DenseParams dense;
  /// (name, ECMAScript pattern) in declaration order.
  std::vector<std::pair<std::string, std::string>> regex_patterns;
  NluModelConfig classifier;
  bool entity_synonyms = false;
  std::optional<FallbackConfig> fallback;
  std::optional<ReferenceMetrics> reference;

  bool uses(FeaturizerKind kind) const;
  /// Throws Error(ConfigError).
  void validate() const;
};

/// Parses the key=value format. `regex.file` is resolved against
/// `base_dir` and its patterns are inlined. Throws Error(ConfigError).
PipelineConfig parse_pipeline_config(std::string_view contents, const std::string& base_dir = ".");
PipelineConfig load_pipeline_config(const std::string& path);
/// Canonical text; parse(serialize(c)) == c up to regex.file inlining.
std::string serialize_pipeline_config(const PipelineConfig& config);

std::vector<std::string> preset_names();
/// Raw annotated text of a shipped preset ("P1".."P8").
std::string_view preset_text(std::string_view name);
PipelineConfig preset(std::string_view name);
/// "all" or a comma-separated list of preset names or config paths.
std::vector<PipelineConfig> resolve_presets(std::string_view spec);

struct ParseResult {
  std::string text;
  std::vector<Token> tokens;
  /// After fallback; nlu_fallback first when it fired.
  IntentRanking ranking;
  std::vector<EntitySpan> entities;
  FallbackReason fallback = FallbackReason::None;

  const std::string& intent() const { return ranking.front().intent; }
  double confidence() const { return ranking.front().confidence; }
};

/// A fitted pipeline. Immutable after fit/load; parse is thread-safe.
class NluPipeline {
 public:
  /// Fits featurizers on `train` only, then trains the classifier with
  /// `seed` as its seed.
  static NluPipeline fit(const PipelineConfig& config, const TrainingSet& train,
                         std::uint64_t seed);

  MessageFeatures featurize(std::string_view text) const;
  ParseResult parse(std::string_view text) const;

  const PipelineConfig& config() const { return config_; }
  const NluModel& model() const { return *model_; }
  const std::vector<double>& loss_curve() const { return loss_curve_; }
  const SynonymTable& synonyms() const { return synonyms_; }

  std::string serialize() const;
  static NluPipeline deserialize(std::string_view bytes);
  void save(const std::string& path) const;
  static NluPipeline load(const std::string& path);

 private:
  NluPipeline() = default;
  void prepare_sources();

  PipelineConfig config_;
  CountVectorVocab vocab_;
  RegexPatternSet regex_;
  std::optional<DenseSource> dense_;
  SynonymTable synonyms_;
  std::optional<NluModel> model_;
  std::vector<double> loss_curve_;
};

}  // namespace bnlu
