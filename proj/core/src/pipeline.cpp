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

#include "banglanlu/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <sstream>

#include "archive.hpp"
#include "banglanlu/errors.hpp"
#include "banglanlu/text.hpp"

namespace bnlu {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kPresetTexts[];
extern const std::size_t kPresetCount;
}  // namespace detail

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, what);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    config_error("`" + key + "` expects a number, got `" + value + "`");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = text::ascii_lower(value);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  config_error("`" + key + "` expects true or false, got `" + value + "`");
}

FeaturizerKind featurizer_from_string(const std::string& name) {
  if (name == "regex") return FeaturizerKind::Regex;
  if (name == "lexical_syntactic") return FeaturizerKind::LexicalSyntactic;
  if (name == "count_vector") return FeaturizerKind::CountVector;
  if (name == "dense") return FeaturizerKind::Dense;
  config_error("unknown featurizer `" + name + "`");
}

DenseSourceKind dense_source_from_string(const std::string& name) {
  if (name == "auto") return DenseSourceKind::Auto;
  if (name == "hashed") return DenseSourceKind::Hashed;
  if (name == "pretrained") return DenseSourceKind::Pretrained;
  config_error("unknown dense.source `" + name + "`");
}

std::string_view to_string(DenseSourceKind kind) {
  switch (kind) {
    case DenseSourceKind::Auto: return "auto";
    case DenseSourceKind::Hashed: return "hashed";
    case DenseSourceKind::Pretrained: return "pretrained";
  }
  return "auto";
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::string_view to_string(FeaturizerKind kind) {
  switch (kind) {
    case FeaturizerKind::Regex: return "regex";
    case FeaturizerKind::LexicalSyntactic: return "lexical_syntactic";
    case FeaturizerKind::CountVector: return "count_vector";
    case FeaturizerKind::Dense: return "dense";
  }
  return "regex";
}

bool PipelineConfig::uses(FeaturizerKind kind) const {
  return std::find(featurizers.begin(), featurizers.end(), kind) != featurizers.end();
}

void PipelineConfig::validate() const {
  if (name.empty()) config_error("pipeline has no name");
  if (featurizers.empty()) config_error("pipeline " + name + " lists no featurizers");
  for (std::size_t i = 0; i < featurizers.size(); ++i) {
    for (std::size_t j = i + 1; j < featurizers.size(); ++j) {
      if (featurizers[i] == featurizers[j]) {
        config_error("featurizer `" + std::string(to_string(featurizers[i])) + "` listed twice");
      }
    }
  }
  if (uses(FeaturizerKind::CountVector) &&
      (count_vector.min_ngram < 1 || count_vector.max_ngram < count_vector.min_ngram)) {
    config_error("count_vector n-gram range is empty");
  }
  if (uses(FeaturizerKind::Dense)) {
    if (dense.source == DenseSourceKind::Pretrained && dense.vectors_path.empty()) {
      config_error("dense.source = pretrained needs dense.vectors");
    }
    if (dense.source != DenseSourceKind::Pretrained && dense.dim == 0) {
      config_error("dense.dim must be positive");
    }
  }
  if (uses(FeaturizerKind::Regex) && regex_patterns.empty()) {
    config_error("regex featurizer listed without any regex.pattern.* entries");
  }
  classifier.validate();
  if (fallback) fallback->validate();
}

PipelineConfig parse_pipeline_config(std::string_view contents, const std::string& base_dir) {
  PipelineConfig c;
  bool saw_tokenizer = false;
  bool fallback_enabled = false;
  FallbackConfig fb;
  ReferenceMetrics ref;
  bool saw_reference = false;

  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = text::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = text::trim(stripped.substr(0, eq));
    const std::string value = text::trim(stripped.substr(eq + 1));

    if (key == "name") {
      c.name = value;
    } else if (key == "tokenizer") {
      c.tokenizer = tokenizer_from_string(value);
      saw_tokenizer = true;
    } else if (key == "featurizers") {
      c.featurizers.clear();
      for (const auto& f : split_list(value)) c.featurizers.push_back(featurizer_from_string(f));
    } else if (key == "count_vector.analyzer") {
      c.count_vector.analyzer = analyzer_from_string(value);
    } else if (key == "count_vector.min_ngram") {
      c.count_vector.min_ngram = parse_number<std::size_t>(key, value);
    } else if (key == "count_vector.max_ngram") {
      c.count_vector.max_ngram = parse_number<std::size_t>(key, value);
    } else if (key == "dense.source") {
      c.dense.source = dense_source_from_string(value);
    } else if (key == "dense.dim") {
      c.dense.dim = parse_number<std::size_t>(key, value);
    } else if (key == "dense.seed") {
      c.dense.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "dense.label") {
      c.dense.label = value;
    } else if (key == "dense.vectors") {
      c.dense.vectors_path = value;
    } else if (key.rfind("regex.pattern.", 0) == 0) {
      c.regex_patterns.emplace_back(key.substr(14), value);
    } else if (key == "regex.file") {
      const auto path = std::filesystem::path(base_dir) / value;
      const RegexPatternSet loaded = load_regex_patterns(read_file(path.string()));
      for (const auto& p : loaded.patterns()) c.regex_patterns.emplace_back(p.name, p.pattern);
    } else if (key == "diet.embed_dim") {
      c.classifier.embed_dim = parse_number<std::size_t>(key, value);
    } else if (key == "diet.transformer_layers") {
      c.classifier.transformer_layers = parse_number<std::size_t>(key, value);
    } else if (key == "diet.attention_heads") {
      c.classifier.attention_heads = parse_number<std::size_t>(key, value);
    } else if (key == "diet.label_embed_dim") {
      c.classifier.label_embed_dim = parse_number<std::size_t>(key, value);
    } else if (key == "diet.epochs") {
      c.classifier.epochs = parse_number<std::size_t>(key, value);
    } else if (key == "diet.learning_rate") {
      c.classifier.learning_rate = parse_number<double>(key, value);
    } else if (key == "diet.batch_size") {
      c.classifier.batch_size = parse_number<std::size_t>(key, value);
    } else if (key == "diet.weight_decay") {
      c.classifier.weight_decay = parse_number<double>(key, value);
    } else if (key == "diet.encoder_learning_rate_scale") {
      c.classifier.encoder_learning_rate_scale = parse_number<double>(key, value);
    } else if (key == "diet.cosine_decay") {
      c.classifier.cosine_decay = parse_bool(key, value);
    } else if (key == "diet.gradient_clip_norm") {
      c.classifier.gradient_clip_norm = parse_number<double>(key, value);
    } else if (key == "diet.dropout") {
      c.classifier.dropout = parse_number<double>(key, value);
    } else if (key == "diet.seed") {
      c.classifier.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "entity_synonyms") {
      c.entity_synonyms = parse_bool(key, value);
    } else if (key == "fallback") {
      fallback_enabled = parse_bool(key, value);
    } else if (key == "fallback.threshold") {
      fb.threshold = parse_number<double>(key, value);
    } else if (key == "fallback.ambiguity_threshold") {
      fb.ambiguity_threshold = parse_number<double>(key, value);
    } else if (key == "fallback.intent") {
      fb.fallback_intent_name = value;
    } else if (key == "reference.accuracy") {
      ref.accuracy = parse_number<double>(key, value);
      saw_reference = true;
    } else if (key == "reference.precision") {
      ref.precision = parse_number<double>(key, value);
      saw_reference = true;
    } else if (key == "reference.recall") {
      ref.recall = parse_number<double>(key, value);
      saw_reference = true;
    } else if (key == "reference.f1") {
      ref.f1 = parse_number<double>(key, value);
      saw_reference = true;
    } else {
      config_error("line " + std::to_string(line_no) + ": unknown key `" + key + "`");
    }
  }
  if (!saw_tokenizer) config_error("pipeline config has no tokenizer");
  if (fallback_enabled) c.fallback = fb;
  if (saw_reference) c.reference = ref;
  c.validate();
  // Compile once so a bad pattern fails at load time.
  RegexPatternSet check;
  for (const auto& [name, pattern] : c.regex_patterns) check.add(name, pattern);
  return c;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_pipeline_config(read_file(path), parent.empty() ? "." : parent.string());
}

std::string serialize_pipeline_config(const PipelineConfig& c) {
  std::ostringstream out;
  out << "name = " << c.name << "\n";
  out << "tokenizer = " << to_string(c.tokenizer) << "\n";
  out << "featurizers = ";
  for (std::size_t i = 0; i < c.featurizers.size(); ++i) {
    out << (i ? ", " : "") << to_string(c.featurizers[i]);
  }
  out << "\n";
  for (const auto& [name, pattern] : c.regex_patterns) {
    out << "regex.pattern." << name << " = " << pattern << "\n";
  }
  out << "count_vector.analyzer = " << to_string(c.count_vector.analyzer) << "\n"
      << "count_vector.min_ngram = " << c.count_vector.min_ngram << "\n"
      << "count_vector.max_ngram = " << c.count_vector.max_ngram << "\n"
      << "dense.source = " << to_string(c.dense.source) << "\n"
      << "dense.dim = " << c.dense.dim << "\n"
      << "dense.seed = " << c.dense.seed << "\n";
  if (!c.dense.label.empty()) out << "dense.label = " << c.dense.label << "\n";
  if (!c.dense.vectors_path.empty()) out << "dense.vectors = " << c.dense.vectors_path << "\n";
  const NluModelConfig& m = c.classifier;
  out << "diet.embed_dim = " << m.embed_dim << "\n"
      << "diet.transformer_layers = " << m.transformer_layers << "\n"
      << "diet.attention_heads = " << m.attention_heads << "\n"
      << "diet.label_embed_dim = " << m.label_embed_dim << "\n"
      << "diet.epochs = " << m.epochs << "\n"
      << "diet.learning_rate = " << format_double(m.learning_rate) << "\n"
      << "diet.batch_size = " << m.batch_size << "\n"
      << "diet.weight_decay = " << format_double(m.weight_decay) << "\n"
      << "diet.encoder_learning_rate_scale = " << format_double(m.encoder_learning_rate_scale)
      << "\n"
      << "diet.cosine_decay = " << (m.cosine_decay ? "true" : "false") << "\n"
      << "diet.gradient_clip_norm = " << format_double(m.gradient_clip_norm) << "\n"
      << "diet.dropout = " << format_double(m.dropout) << "\n"
      << "diet.seed = " << m.seed << "\n"
      << "entity_synonyms = " << (c.entity_synonyms ? "true" : "false") << "\n"
      << "fallback = " << (c.fallback ? "true" : "false") << "\n";
  if (c.fallback) {
    out << "fallback.threshold = " << format_double(c.fallback->threshold) << "\n"
        << "fallback.ambiguity_threshold = " << format_double(c.fallback->ambiguity_threshold)
        << "\n"
        << "fallback.intent = " << c.fallback->fallback_intent_name << "\n";
  }
  if (c.reference) {
    out << "reference.accuracy = " << format_double(c.reference->accuracy) << "\n"
        << "reference.precision = " << format_double(c.reference->precision) << "\n"
        << "reference.recall = " << format_double(c.reference->recall) << "\n"
        << "reference.f1 = " << format_double(c.reference->f1) << "\n";
  }
  return out.str();
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < detail::kPresetCount; ++i) {
    names.emplace_back(detail::kPresetTexts[i].first);
  }
  return names;
}

std::string_view preset_text(std::string_view name) {
  const std::string upper = [&] {
    std::string s(name);
    for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
  }();
  for (std::size_t i = 0; i < detail::kPresetCount; ++i) {
    if (detail::kPresetTexts[i].first == upper) return detail::kPresetTexts[i].second;
  }
  config_error("unknown preset `" + std::string(name) + "`");
}

PipelineConfig preset(std::string_view name) { return parse_pipeline_config(preset_text(name)); }

std::vector<PipelineConfig> resolve_presets(std::string_view spec) {
  std::vector<PipelineConfig> out;
  if (text::ascii_lower(text::trim(spec)) == "all") {
    for (const auto& name : preset_names()) out.push_back(preset(name));
    return out;
  }
  for (const auto& item : split_list(std::string(spec))) {
    if (std::filesystem::exists(item) && !std::filesystem::is_directory(item)) {
      out.push_back(load_pipeline_config(item));
    } else {
      out.push_back(preset(item));
    }
  }
  if (out.empty()) config_error("no pipelines selected");
  return out;
}

// --- fitted pipeline -------------------------------------------------------

void NluPipeline::prepare_sources() {
  regex_ = RegexPatternSet();
  for (const auto& [name, pattern] : config_.regex_patterns) regex_.add(name, pattern);
  dense_.reset();
  if (config_.uses(FeaturizerKind::Dense)) {
    const DenseParams& d = config_.dense;
    const bool pretrained = d.source == DenseSourceKind::Pretrained ||
                            (d.source == DenseSourceKind::Auto && !d.vectors_path.empty());
    if (pretrained) {
      dense_ = load_pretrained_vectors(read_file(d.vectors_path));
    } else {
      dense_ = HashedNGram{d.dim, d.seed};
    }
  }
  synonyms_ = SynonymTable();
}

MessageFeatures NluPipeline::featurize(std::string_view message) const {
  std::vector<Token> tokens = tokenize(config_.tokenizer, message);
  std::vector<FeaturizerOutput> outputs;
  outputs.reserve(config_.featurizers.size());
  for (FeaturizerKind kind : config_.featurizers) {
    switch (kind) {
      case FeaturizerKind::Regex:
        outputs.emplace_back(regex_featurize(message, tokens, regex_));
        break;
      case FeaturizerKind::LexicalSyntactic:
        outputs.emplace_back(
            SparseBlock{lexical_syntactic_featurize(tokens), SparseVector::zeros(kLexSynDim)});
        break;
      case FeaturizerKind::CountVector:
        outputs.emplace_back(count_vector_featurize(tokens, vocab_));
        break;
      case FeaturizerKind::Dense:
        outputs.emplace_back(dense_featurize(tokens, *dense_));
        break;
    }
  }
  MessageFeatures f = assemble_features(std::move(tokens), outputs);
  f.text = std::string(message);
  return f;
}

NluPipeline NluPipeline::fit(const PipelineConfig& config, const TrainingSet& train,
                             std::uint64_t seed) {
  config.validate();
  if (train.examples.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training examples");
  NluPipeline p;
  p.config_ = config;
  p.config_.classifier.seed = seed;
  p.prepare_sources();
  if (config.entity_synonyms) p.synonyms_ = SynonymTable(train.synonyms);

  if (config.uses(FeaturizerKind::CountVector)) {
    std::vector<std::vector<Token>> corpus;
    corpus.reserve(train.examples.size());
    for (const auto& ex : train.examples) corpus.push_back(tokenize(config.tokenizer, ex.text));
    p.vocab_ = fit_count_vocab(corpus, config.count_vector.analyzer, config.count_vector.min_ngram,
                               config.count_vector.max_ngram);
  }

  const std::vector<std::string> tags = bio_tag_list(train.entity_types);
  std::vector<MessageFeatures> features;
  features.reserve(train.examples.size());
  for (const auto& ex : train.examples) features.push_back(p.featurize(ex.text));
  std::vector<LabeledMessage> labeled;
  labeled.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& ex = train.examples[i];
    const auto it = std::find(train.intents.begin(), train.intents.end(), ex.intent);
    if (it == train.intents.end()) {
      throw Error(ErrorCode::UnknownLabel, "example intent `" + ex.intent + "` not declared");
    }
    labeled.push_back({&features[i], static_cast<int>(it - train.intents.begin()),
                       bio_encode(features[i].tokens, ex.entities, tags)});
  }
  const std::size_t sparse_dim = features.front().sparse_dim();
  const std::size_t dense_dim = features.front().dense_dim();
  TrainResult trained =
      bnlu::train(labeled, train.intents, train.entity_types, sparse_dim, dense_dim, p.config_.classifier);
  p.model_.emplace(std::move(trained.model));
  p.loss_curve_ = std::move(trained.loss_curve);
  return p;
}

ParseResult NluPipeline::parse(std::string_view message) const {
  const MessageFeatures f = featurize(message);
  NluPrediction pred = predict(*model_, f);
  ParseResult r;
  r.text = std::string(message);
  r.tokens = f.tokens;
  r.entities = config_.entity_synonyms ? map_synonyms(std::move(pred.entities), synonyms_)
                                       : std::move(pred.entities);
  r.ranking = std::move(pred.ranking);
  if (config_.fallback) {
    r.fallback = fallback_reason(r.ranking, *config_.fallback);
    r.ranking = apply_fallback(std::move(r.ranking), *config_.fallback);
  }
  return r;
}

std::string NluPipeline::serialize() const {
  nlohmann::json h;
  h["kind"] = "nlu_pipeline";
  h["pipeline"] = serialize_pipeline_config(config_);
  nlohmann::json vocab = nlohmann::json::array();
  for (const auto& [gram, index] : vocab_.index) vocab.push_back(gram);
  h["count_vocab"] = {{"analyzer", to_string(vocab_.analyzer)},
                      {"min_ngram", vocab_.min_ngram},
                      {"max_ngram", vocab_.max_ngram},
                      {"ngrams", std::move(vocab)}};
  h["synonyms"] = synonyms_.entries();
  const NluModel& m = *model_;
  h["model"] = {{"sparse_dim", m.sparse_dim()},
                {"dense_dim", m.dense_dim()},
                {"intents", m.intents()},
                {"entity_types", m.entity_types()},
                {"tags", m.tags()}};
  h["loss_curve"] = loss_curve_;
  return archive::write(std::move(h), m.params());
}

NluPipeline NluPipeline::deserialize(std::string_view bytes) {
  archive::Contents c = archive::read(bytes);
  if (archive::field<std::string>(c.header, "kind") != "nlu_pipeline") {
    throw Error(ErrorCode::ArchiveFormat, "archive does not hold an NLU pipeline");
  }
  NluPipeline p;
  p.config_ = parse_pipeline_config(archive::field<std::string>(c.header, "pipeline"));
  p.prepare_sources();

  const nlohmann::json& cv = c.header.at("count_vocab");
  p.vocab_.analyzer = analyzer_from_string(archive::field<std::string>(cv, "analyzer"));
  p.vocab_.min_ngram = archive::field<std::size_t>(cv, "min_ngram");
  p.vocab_.max_ngram = archive::field<std::size_t>(cv, "max_ngram");
  const auto grams = archive::field<std::vector<std::string>>(cv, "ngrams");
  for (std::size_t i = 0; i < grams.size(); ++i) {
    p.vocab_.index.emplace(grams[i], static_cast<std::uint32_t>(i));
  }
  const auto synonyms = archive::field<std::map<std::string, std::string>>(c.header, "synonyms");
  p.synonyms_ = SynonymTable(synonyms);

  const nlohmann::json& mj = c.header.at("model");
  p.model_.emplace(p.config_.classifier, archive::field<std::size_t>(mj, "sparse_dim"),
                   archive::field<std::size_t>(mj, "dense_dim"),
                   archive::field<std::vector<std::string>>(mj, "intents"),
                   archive::field<std::vector<std::string>>(mj, "entity_types"));
  archive::restore(p.model_->params(), c.tensors);
  p.loss_curve_ = archive::field<std::vector<double>>(c.header, "loss_curve");
  return p;
}

void NluPipeline::save(const std::string& path) const { write_file(path, serialize()); }

NluPipeline NluPipeline::load(const std::string& path) { return deserialize(read_file(path)); }

}  // namespace bnlu
