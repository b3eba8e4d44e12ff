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

// Joint intent classifier and BIO entity tagger over assembled message
// features: sparse and dense projections into a shared width, a
// transformer encoder over the tokens plus one sentence slot, a
// dot-product intent head against learned label embeddings, and a
// per-token tag head.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "banglanlu/corpus.hpp"
#include "banglanlu/featurize.hpp"
#include "banglanlu/nn.hpp"

namespace bnlu {

struct NluModelConfig {
  std::size_t embed_dim = 128;
  std::size_t transformer_layers = 2;
  std::size_t attention_heads = 4;
  std::size_t label_embed_dim = 20;
  std::size_t epochs = 500;
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  /// Decoupled weight decay applied to weight matrices and embeddings.
  double weight_decay = 0.3;
  /// Learning-rate multiplier for the transformer encoder tensors; keeps
  /// attention stable at the large global rate.
  double encoder_learning_rate_scale = 0.1;
  /// Cosine decay of the learning rate from its configured value to zero
  /// over the run.
  bool cosine_decay = true;
  /// Rescales a step's gradients whose global L2 norm exceeds this; 0
  /// disables clipping.
  double gradient_clip_norm = 0.0;
  /// Training-time dropout rate for sparse input entries and for the
  /// projected embeddings; 0 disables it.
  double dropout = 0.2;
  std::uint64_t seed = 0;

  /// Throws Error(ConfigError) when an invariant does not hold.
  void validate() const;
};

struct IntentScore {
  std::string intent;
  double confidence = 0.0;

  friend bool operator==(const IntentScore&, const IntentScore&) = default;
};

/// Sorted by descending confidence.
using IntentRanking = std::vector<IntentScore>;

/// One tag per token: "O", "B-<entity>" or "I-<entity>".
using BioTagSequence = std::vector<std::string>;

/// ["O", "B-e1", "I-e1", "B-e2", ...] for the given entity types.
std::vector<std::string> bio_tag_list(std::span<const std::string> entity_types);

/// Tag index per token: the first token overlapping a span gets B-, later
/// overlapping tokens I-.
std::vector<int> bio_encode(std::span<const Token> tokens, std::span<const EntitySpan> spans,
                            std::span<const std::string> tags);

/// Maximal B-e (I-e)* runs become spans; a stray I-e starts a new span.
/// Values are cut from `message` when given, else tokens joined by spaces.
std::vector<EntitySpan> decode_bio(const BioTagSequence& tags, std::span<const Token> tokens,
                                   std::string_view message = {});

class NluModel {
 public:
  /// Declares every tensor and initialises it from `config.seed`.
  NluModel(const NluModelConfig& config, std::size_t sparse_dim, std::size_t dense_dim,
           std::vector<std::string> intents, std::vector<std::string> entity_types);

  const NluModelConfig& config() const { return config_; }
  std::size_t sparse_dim() const { return sparse_dim_; }
  std::size_t dense_dim() const { return dense_dim_; }
  const std::vector<std::string>& intents() const { return intents_; }
  const std::vector<std::string>& entity_types() const { return entity_types_; }
  const std::vector<std::string>& tags() const { return tags_; }

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  struct Forward;
  /// Runs the network over a batch of messages; used by encode, predict
  /// and the loss.
  /// With `dropout_rng` set, applies training-time dropout drawn from it.
  Forward forward(std::span<const MessageFeatures* const> batch,
                  Rng* dropout_rng = nullptr) const;

 private:
  friend struct NluLoss;

  NluModelConfig config_;
  std::size_t sparse_dim_;
  std::size_t dense_dim_;
  std::vector<std::string> intents_;
  std::vector<std::string> entity_types_;
  std::vector<std::string> tags_;
  nn::ParameterSet params_;
  nn::Encoder encoder_;
  std::size_t sparse_projection_ = 0;
  std::size_t dense_projection_ = 0;
  std::size_t intent_projection_ = 0;
  std::size_t intent_bias_ = 0;
  std::size_t intent_labels_ = 0;
  std::size_t entity_projection_ = 0;
  std::size_t entity_bias_ = 0;
};

struct NluModel::Forward {
  std::vector<std::size_t> offsets;  // row ranges per message, sentence slot last
  std::vector<SparseVector> sparse_inputs;
  nn::Matrix dense_inputs;
  nn::Matrix dropout_mask;           // scaled keep mask on `embedded`; empty without dropout
  nn::Matrix embedded;               // projected inputs
  nn::EncoderCache encoder_cache;
  nn::Matrix encoded;
  nn::Matrix sentence;               // encoded sentence rows
  nn::Matrix sentence_label_space;   // sentence rows after the intent projection
  nn::Matrix intent_logits;
  nn::Matrix token_rows;             // encoded token rows, all messages stacked
  nn::Matrix tag_logits;
};

struct Encoding {
  nn::Matrix tokens;   // one row per token
  nn::Vector sentence;
};

/// Token and sentence embeddings after the encoder. Throws
/// Error(DimensionMismatch) if the features do not fit the model.
Encoding encode(const MessageFeatures& features, const NluModel& model);

struct NluPrediction {
  IntentRanking ranking;
  BioTagSequence tags;
  std::vector<EntitySpan> entities;
};

NluPrediction predict(const NluModel& model, const MessageFeatures& features);

/// One supervised message: features plus intent index and per-token tag
/// indices.
struct LabeledMessage {
  const MessageFeatures* features = nullptr;
  int intent = 0;
  std::vector<int> tags;
};

struct LossWeights {
  double intent = 1.0;
  double entity = 1.0;
};

struct LossResult {
  double loss = 0.0;
  double intent_loss = 0.0;
  double entity_loss = 0.0;
  nn::ParameterSet gradients;
};

/// Mean intent cross-entropy plus mean per-token tag cross-entropy and
/// the analytic gradient of their weighted sum, with dropout drawn from
/// `dropout_rng` when it is set. Throws Error(NonFiniteLoss).
LossResult loss_and_gradients(const NluModel& model, std::span<const LabeledMessage> batch,
                              LossWeights weights = {}, Rng* dropout_rng = nullptr);

struct TrainResult {
  NluModel model;
  std::vector<double> loss_curve;  // mean loss per epoch
};

/// Adam over seeded mini-batches (full batch when the set is smaller than
/// the batch size). Throws Error(EmptyTrainingSet) or Error(NonFiniteLoss).
TrainResult train(std::span<const LabeledMessage> data, std::vector<std::string> intents,
                  std::vector<std::string> entity_types, std::size_t sparse_dim,
                  std::size_t dense_dim, const NluModelConfig& config);

}  // namespace bnlu
