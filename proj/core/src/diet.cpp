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

#include "banglanlu/diet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "banglanlu/errors.hpp"
#include "banglanlu/text.hpp"

namespace bnlu {

void NluModelConfig::validate() const {
  if (embed_dim == 0 || attention_heads == 0 || embed_dim % attention_heads != 0) {
    throw Error(ErrorCode::ConfigError, "embed_dim must be a positive multiple of attention_heads");
  }
  if (label_embed_dim == 0) throw Error(ErrorCode::ConfigError, "label_embed_dim must be positive");
  if (epochs < 1) throw Error(ErrorCode::ConfigError, "epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::ConfigError, "learning_rate must be positive");
  if (batch_size < 1) throw Error(ErrorCode::ConfigError, "batch_size must be at least 1");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw Error(ErrorCode::ConfigError, "weight_decay must be a finite non-negative number");
  }
  if (!(encoder_learning_rate_scale > 0.0) || !std::isfinite(encoder_learning_rate_scale)) {
    throw Error(ErrorCode::ConfigError, "encoder_learning_rate_scale must be positive");
  }
  if (!(gradient_clip_norm >= 0.0) || !std::isfinite(gradient_clip_norm)) {
    throw Error(ErrorCode::ConfigError, "gradient_clip_norm must be a finite non-negative number");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorCode::ConfigError, "dropout must lie in [0, 1)");
  }
}

std::vector<std::string> bio_tag_list(std::span<const std::string> entity_types) {
  std::vector<std::string> tags = {"O"};
  for (const auto& e : entity_types) {
    tags.push_back("B-" + e);
    tags.push_back("I-" + e);
  }
  return tags;
}

std::vector<int> bio_encode(std::span<const Token> tokens, std::span<const EntitySpan> spans,
                            std::span<const std::string> tags) {
  std::vector<int> out(tokens.size(), 0);
  const auto tag_index = [&](const std::string& tag) {
    const auto it = std::find(tags.begin(), tags.end(), tag);
    if (it == tags.end()) throw Error(ErrorCode::UnknownLabel, "unknown tag `" + tag + "`");
    return static_cast<int>(it - tags.begin());
  };
  for (const EntitySpan& span : spans) {
    bool first = true;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].start < span.end && span.start < tokens[t].end) {
        if (out[t] == 0) out[t] = tag_index((first ? "B-" : "I-") + span.entity);
        first = false;
      }
    }
  }
  return out;
}

std::vector<EntitySpan> decode_bio(const BioTagSequence& tags, std::span<const Token> tokens,
                                   std::string_view message) {
  if (tags.size() != tokens.size()) {
    throw Error(ErrorCode::InvalidArgument, "tag count does not match token count");
  }
  std::vector<EntitySpan> spans;
  std::size_t first = 0;
  std::size_t last = 0;
  std::string current;
  const auto close = [&] {
    if (current.empty()) return;
    EntitySpan span;
    span.start = tokens[first].start;
    span.end = tokens[last].end;
    span.entity = current;
    if (!message.empty()) {
      span.value = text::slice(message, span.start, span.end);
    } else {
      for (std::size_t t = first; t <= last; ++t) {
        if (t > first) span.value += ' ';
        span.value += tokens[t].text;
      }
    }
    spans.push_back(std::move(span));
    current.clear();
  };
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const std::string& tag = tags[t];
    if (tag == "O") {
      close();
      continue;
    }
    if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') {
      throw Error(ErrorCode::InvalidArgument, "malformed BIO tag `" + tag + "`");
    }
    const std::string entity = tag.substr(2);
    if (tag[0] == 'I' && current == entity) {
      last = t;
      continue;
    }
    close();
    current = entity;
    first = last = t;
  }
  close();
  return spans;
}

NluModel::NluModel(const NluModelConfig& config, std::size_t sparse_dim, std::size_t dense_dim,
                   std::vector<std::string> intents, std::vector<std::string> entity_types)
    : config_(config),
      sparse_dim_(sparse_dim),
      dense_dim_(dense_dim),
      intents_(std::move(intents)),
      entity_types_(std::move(entity_types)),
      tags_(bio_tag_list(entity_types_)) {
  config_.validate();
  const auto d = static_cast<Eigen::Index>(config_.embed_dim);
  const auto l = static_cast<Eigen::Index>(config_.label_embed_dim);
  sparse_projection_ = params_.add("sparse_projection", static_cast<Eigen::Index>(sparse_dim), d);
  dense_projection_ = params_.add("dense_projection", static_cast<Eigen::Index>(dense_dim), d);
  encoder_.declare(params_, "encoder",
                   nn::EncoderConfig{d, static_cast<Eigen::Index>(config_.attention_heads), 2 * d,
                                     config_.transformer_layers});
  intent_projection_ = params_.add("intent.projection", d, l);
  intent_bias_ = params_.add("intent.projection.bias", 1, l);
  intent_labels_ = params_.add("intent.labels", static_cast<Eigen::Index>(intents_.size()), l);
  entity_projection_ = params_.add("entity.projection", d, static_cast<Eigen::Index>(tags_.size()));
  entity_bias_ = params_.add("entity.projection.bias", 1, static_cast<Eigen::Index>(tags_.size()));
  Rng rng(config_.seed);
  nn::initialize(params_, rng);
}

namespace {

void check_dims(const MessageFeatures& f, std::size_t sparse_dim, std::size_t dense_dim) {
  bool ok = f.sentence_sparse.dim == sparse_dim && f.sentence_dense.dim() == dense_dim &&
            f.token_sparse.size() == f.tokens.size() && f.token_dense.size() == f.tokens.size();
  for (const auto& s : f.token_sparse) ok = ok && s.dim == sparse_dim;
  for (const auto& d : f.token_dense) ok = ok && d.dim() == dense_dim;
  if (!ok) {
    throw Error(ErrorCode::DimensionMismatch,
                "features have sparse/dense width " + std::to_string(f.sentence_sparse.dim) + "/" +
                    std::to_string(f.sentence_dense.dim()) + ", model expects " +
                    std::to_string(sparse_dim) + "/" + std::to_string(dense_dim));
  }
}

void add_sparse_row(nn::Matrix& out, Eigen::Index row, const SparseVector& v, const nn::Matrix& w) {
  for (std::size_t k = 0; k < v.nnz(); ++k) {
    out.row(row) += v.values[k] * w.row(static_cast<Eigen::Index>(v.indices[k]));
  }
}

}  // namespace

NluModel::Forward NluModel::forward(std::span<const MessageFeatures* const> batch,
                                    Rng* dropout_rng) const {
  const double rate = dropout_rng != nullptr ? config_.dropout : 0.0;
  const double keep_scale = 1.0 / (1.0 - rate);
  Forward f;
  f.offsets.push_back(0);
  std::size_t token_count = 0;
  for (const MessageFeatures* m : batch) {
    check_dims(*m, sparse_dim_, dense_dim_);
    f.offsets.push_back(f.offsets.back() + m->tokens.size() + 1);
    token_count += m->tokens.size();
  }
  const auto rows = static_cast<Eigen::Index>(f.offsets.back());
  const auto d = static_cast<Eigen::Index>(config_.embed_dim);

  f.embedded = nn::Matrix::Zero(rows, d);
  f.dense_inputs = nn::Matrix::Zero(rows, static_cast<Eigen::Index>(dense_dim_));
  const nn::Matrix& ws = params_[sparse_projection_];
  f.sparse_inputs.reserve(static_cast<std::size_t>(rows));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const MessageFeatures& m = *batch[b];
    const auto base = static_cast<Eigen::Index>(f.offsets[b]);
    const auto n = static_cast<Eigen::Index>(m.tokens.size());
    for (Eigen::Index t = 0; t < n; ++t) {
      f.sparse_inputs.push_back(m.token_sparse[static_cast<std::size_t>(t)]);
      if (dense_dim_ > 0) {
        f.dense_inputs.row(base + t) = Eigen::Map<const Eigen::RowVectorXd>(
            m.token_dense[static_cast<std::size_t>(t)].values.data(),
            static_cast<Eigen::Index>(dense_dim_));
      }
    }
    f.sparse_inputs.push_back(m.sentence_sparse);
    if (dense_dim_ > 0) {
      f.dense_inputs.row(base + n) = Eigen::Map<const Eigen::RowVectorXd>(
          m.sentence_dense.values.data(), static_cast<Eigen::Index>(dense_dim_));
    }
  }
  if (rate > 0.0) {
    // Sparse input dropout: each stored entry survives independently.
    for (SparseVector& v : f.sparse_inputs) {
      std::size_t kept = 0;
      for (std::size_t k = 0; k < v.nnz(); ++k) {
        if (dropout_rng->unit() < rate) continue;
        v.indices[kept] = v.indices[k];
        v.values[kept] = v.values[k] * keep_scale;
        ++kept;
      }
      v.indices.resize(kept);
      v.values.resize(kept);
    }
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    add_sparse_row(f.embedded, r, f.sparse_inputs[static_cast<std::size_t>(r)], ws);
  }
  if (dense_dim_ > 0) f.embedded.noalias() += f.dense_inputs * params_[dense_projection_];
  if (rate > 0.0) {
    f.dropout_mask.resize(rows, d);
    for (Eigen::Index i = 0; i < f.dropout_mask.size(); ++i) {
      f.dropout_mask.data()[i] = dropout_rng->unit() < rate ? 0.0 : keep_scale;
    }
    f.embedded.array() *= f.dropout_mask.array();
  }

  f.encoded = encoder_.forward(params_, f.embedded, f.offsets, f.encoder_cache);

  const auto batch_size = static_cast<Eigen::Index>(batch.size());
  f.sentence.resize(batch_size, d);
  f.token_rows.resize(static_cast<Eigen::Index>(token_count), d);
  Eigen::Index next_token = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto begin = static_cast<Eigen::Index>(f.offsets[b]);
    const auto end = static_cast<Eigen::Index>(f.offsets[b + 1]);
    for (Eigen::Index r = begin; r + 1 < end; ++r) f.token_rows.row(next_token++) = f.encoded.row(r);
    f.sentence.row(static_cast<Eigen::Index>(b)) = f.encoded.row(end - 1);
  }

  f.sentence_label_space = f.sentence * params_[intent_projection_];
  f.sentence_label_space.rowwise() += params_[intent_bias_].row(0);
  f.intent_logits = f.sentence_label_space * params_[intent_labels_].transpose();
  f.tag_logits = f.token_rows * params_[entity_projection_];
  f.tag_logits.rowwise() += params_[entity_bias_].row(0);
  return f;
}

Encoding encode(const MessageFeatures& features, const NluModel& model) {
  const MessageFeatures* batch[] = {&features};
  NluModel::Forward f = model.forward(batch);
  Encoding e;
  e.tokens = std::move(f.token_rows);
  e.sentence = f.sentence.row(0).transpose();
  return e;
}

NluPrediction predict(const NluModel& model, const MessageFeatures& features) {
  const MessageFeatures* batch[] = {&features};
  const NluModel::Forward f = model.forward(batch);
  NluPrediction out;

  const nn::Matrix probs = nn::softmax_rows(f.intent_logits);
  std::vector<std::size_t> order(model.intents().size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return probs(0, static_cast<Eigen::Index>(a)) > probs(0, static_cast<Eigen::Index>(b));
  });
  for (std::size_t i : order) {
    out.ranking.push_back({model.intents()[i], probs(0, static_cast<Eigen::Index>(i))});
  }

  for (Eigen::Index t = 0; t < f.tag_logits.rows(); ++t) {
    Eigen::Index best = 0;
    f.tag_logits.row(t).maxCoeff(&best);
    out.tags.push_back(model.tags()[static_cast<std::size_t>(best)]);
  }
  out.entities = decode_bio(out.tags, features.tokens, features.text);
  return out;
}

struct NluLoss {
  static LossResult compute(const NluModel& model, std::span<const LabeledMessage> batch,
                            LossWeights weights, Rng* dropout_rng) {
    if (batch.empty()) throw Error(ErrorCode::EmptyTrainingSet, "empty batch");
    std::vector<const MessageFeatures*> features;
    std::vector<int> intents;
    std::vector<int> tags;
    for (const LabeledMessage& m : batch) {
      if (m.tags.size() != m.features->tokens.size()) {
        throw Error(ErrorCode::DimensionMismatch, "tag labels do not match token count");
      }
      features.push_back(m.features);
      intents.push_back(m.intent);
      tags.insert(tags.end(), m.tags.begin(), m.tags.end());
    }
    const NluModel::Forward f = model.forward(features, dropout_rng);
    const nn::ParameterSet& p = model.params_;

    LossResult out;
    out.gradients = p.zeros_like();
    nn::ParameterSet& g = out.gradients;

    nn::Matrix dintent;
    nn::Matrix dtag;
    out.intent_loss = nn::softmax_cross_entropy(f.intent_logits, intents, weights.intent, dintent);
    out.entity_loss = nn::softmax_cross_entropy(f.tag_logits, tags, weights.entity, dtag);
    out.loss = weights.intent * out.intent_loss + weights.entity * out.entity_loss;
    if (!std::isfinite(out.loss)) throw Error(ErrorCode::NonFiniteLoss, "loss is not finite");

    // intent head
    g[model.intent_labels_].noalias() += dintent.transpose() * f.sentence_label_space;
    const nn::Matrix dlabel_space = dintent * p[model.intent_labels_];
    g[model.intent_projection_].noalias() += f.sentence.transpose() * dlabel_space;
    g[model.intent_bias_].row(0) += dlabel_space.colwise().sum();
    const nn::Matrix dsentence = dlabel_space * p[model.intent_projection_].transpose();

    // tag head
    g[model.entity_projection_].noalias() += f.token_rows.transpose() * dtag;
    g[model.entity_bias_].row(0) += dtag.colwise().sum();
    const nn::Matrix dtokens = dtag * p[model.entity_projection_].transpose();

    nn::Matrix dencoded = nn::Matrix::Zero(f.encoded.rows(), f.encoded.cols());
    Eigen::Index next_token = 0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto begin = static_cast<Eigen::Index>(f.offsets[b]);
      const auto end = static_cast<Eigen::Index>(f.offsets[b + 1]);
      for (Eigen::Index r = begin; r + 1 < end; ++r) dencoded.row(r) = dtokens.row(next_token++);
      dencoded.row(end - 1) = dsentence.row(static_cast<Eigen::Index>(b));
    }

    nn::Matrix dembedded = model.encoder_.backward(p, dencoded, f.offsets, f.encoder_cache, g);
    if (f.dropout_mask.size() > 0) dembedded.array() *= f.dropout_mask.array();
    if (model.dense_dim_ > 0) {
      g[model.dense_projection_].noalias() += f.dense_inputs.transpose() * dembedded;
    }
    nn::Matrix& gs = g[model.sparse_projection_];
    for (std::size_t r = 0; r < f.sparse_inputs.size(); ++r) {
      const SparseVector& v = f.sparse_inputs[r];
      for (std::size_t k = 0; k < v.nnz(); ++k) {
        gs.row(static_cast<Eigen::Index>(v.indices[k])) +=
            v.values[k] * dembedded.row(static_cast<Eigen::Index>(r));
      }
    }
    return out;
  }
};

LossResult loss_and_gradients(const NluModel& model, std::span<const LabeledMessage> batch,
                              LossWeights weights, Rng* dropout_rng) {
  return NluLoss::compute(model, batch, weights, dropout_rng);
}

TrainResult train(std::span<const LabeledMessage> data, std::vector<std::string> intents,
                  std::vector<std::string> entity_types, std::size_t sparse_dim,
                  std::size_t dense_dim, const NluModelConfig& config) {
  config.validate();
  if (data.empty() || intents.empty()) {
    throw Error(ErrorCode::EmptyTrainingSet, "no training examples");
  }
  TrainResult result{NluModel(config, sparse_dim, dense_dim, std::move(intents),
                              std::move(entity_types)),
                     {}};
  NluModel& model = result.model;
  nn::Adam adam(model.params(), config.learning_rate);
  adam.set_weight_decay(config.weight_decay);
  adam.scale_learning_rate("encoder.", config.encoder_learning_rate_scale);
  Rng shuffler(config.seed ^ 0x5eed5eed5eedULL);
  Rng dropout(config.seed ^ 0xd20d20d20dULL);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size = std::min(config.batch_size, data.size());
  std::vector<LabeledMessage> batch;
  const std::size_t steps_per_epoch = (order.size() + batch_size - 1) / batch_size;
  const double total_steps = static_cast<double>(config.epochs * steps_per_epoch);
  std::size_t step_index = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffler.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(data[order[i]]);
      LossResult step;
      try {
        step = loss_and_gradients(model, batch, {}, config.dropout > 0.0 ? &dropout : nullptr);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteLoss) throw;
        throw Error(ErrorCode::NonFiniteLoss, "non-finite loss at epoch " + std::to_string(epoch));
      }
      epoch_loss += step.loss * static_cast<double>(stop - start);
      if (config.gradient_clip_norm > 0.0) {
        double squared = 0.0;
        for (const auto& g : step.gradients.entries()) squared += g.value.squaredNorm();
        const double norm = std::sqrt(squared);
        if (norm > config.gradient_clip_norm) {
          for (auto& g : step.gradients.entries()) g.value *= config.gradient_clip_norm / norm;
        }
      }
      if (config.cosine_decay) {
        const double progress = static_cast<double>(step_index) / total_steps;
        adam.set_learning_rate(config.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
      }
      ++step_index;
      adam.step(model.params(), step.gradients);
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return result;
}

}  // namespace bnlu
