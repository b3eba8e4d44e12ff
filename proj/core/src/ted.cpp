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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "banglanlu/dialogue.hpp"
#include "banglanlu/errors.hpp"

namespace bnlu {

namespace {

template <typename Map>
void index_names(const std::vector<std::string>& names, Map& index) {
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
}

}  // namespace

std::vector<std::string> policy_actions(const Domain& domain) {
  std::set<std::string> rest(domain.actions.begin(), domain.actions.end());
  rest.erase(std::string(kActionListen));
  rest.erase(std::string(kActionDefaultFallback));
  std::vector<std::string> out = {std::string(kActionListen), std::string(kActionDefaultFallback)};
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

TedModel::TedModel(const PolicyConfig& config, std::vector<std::string> intents,
                   std::vector<std::string> entity_types, std::vector<std::string> actions)
    : config_(config),
      intents_(std::move(intents)),
      entity_types_(std::move(entity_types)),
      actions_(std::move(actions)) {
  config_.validate();
  if (actions_.empty()) throw Error(ErrorCode::ConfigError, "policy needs at least one action");
  index_names(intents_, intent_index_);
  index_names(entity_types_, entity_index_);
  index_names(actions_, action_index_);
  const auto w = static_cast<Eigen::Index>(kWidth);
  const auto l = static_cast<Eigen::Index>(kLabelDim);
  turn_projection_ = params_.add("turn_projection", static_cast<Eigen::Index>(turn_dim()), w);
  turn_bias_ = params_.add("turn_projection.bias", 1, w);
  position_ = params_.add("position", static_cast<Eigen::Index>(config_.max_history), w);
  encoder_.declare(params_, "encoder",
                   nn::EncoderConfig{w, static_cast<Eigen::Index>(kHeads), 2 * w,
                                     config_.ted_transformer_layers});
  action_projection_ = params_.add("action.projection", w, l);
  action_bias_ = params_.add("action.projection.bias", 1, l);
  action_labels_ = params_.add("action.labels", static_cast<Eigen::Index>(actions_.size()), l);
  Rng rng(config_.seed);
  nn::initialize(params_, rng);
}

nn::Vector TedModel::featurize_turn(const StoryStep& step) const {
  nn::Vector v = nn::Vector::Zero(static_cast<Eigen::Index>(turn_dim()));
  if (step.is_user()) {
    if (const auto it = intent_index_.find(step.name); it != intent_index_.end()) {
      v[static_cast<Eigen::Index>(it->second)] = 1.0;
    }
    for (const std::string& e : step.entities) {
      if (const auto it = entity_index_.find(e); it != entity_index_.end()) {
        v[static_cast<Eigen::Index>(intents_.size() + it->second)] = 1.0;
      }
    }
  } else if (const auto it = action_index_.find(step.name); it != action_index_.end()) {
    v[static_cast<Eigen::Index>(intents_.size() + entity_types_.size() + it->second)] = 1.0;
  }
  return v;
}

// Each window contributes its last max_history turns, or one all-zero turn
// when empty. Position p counts back from the most recent turn.
TedModel::Forward TedModel::forward(std::span<const std::vector<StoryStep>> windows) const {
  Forward f;
  f.offsets.push_back(0);
  for (const auto& w : windows) {
    const std::size_t n = std::max<std::size_t>(1, std::min(w.size(), config_.max_history));
    f.offsets.push_back(f.offsets.back() + n);
  }
  const auto rows = static_cast<Eigen::Index>(f.offsets.back());
  f.turns = nn::Matrix::Zero(rows, static_cast<Eigen::Index>(turn_dim()));
  f.positions.assign(static_cast<std::size_t>(rows), 0);
  for (std::size_t b = 0; b < windows.size(); ++b) {
    const auto& w = windows[b];
    const std::size_t n = f.offsets[b + 1] - f.offsets[b];
    const std::size_t skip = w.size() - std::min(w.size(), n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = f.offsets[b] + i;
      f.positions[row] = n - 1 - i;
      if (skip + i < w.size()) {
        f.turns.row(static_cast<Eigen::Index>(row)) = featurize_turn(w[skip + i]).transpose();
      }
    }
  }
  f.embedded = f.turns * params_[turn_projection_];
  f.embedded.rowwise() += params_[turn_bias_].row(0);
  for (Eigen::Index r = 0; r < rows; ++r) {
    f.embedded.row(r) += params_[position_].row(static_cast<Eigen::Index>(f.positions[r]));
  }
  f.encoded = encoder_.forward(params_, f.embedded, f.offsets, f.encoder_cache);
  f.pooled.resize(static_cast<Eigen::Index>(windows.size()), f.encoded.cols());
  for (std::size_t b = 0; b < windows.size(); ++b) {
    f.pooled.row(static_cast<Eigen::Index>(b)) =
        f.encoded.row(static_cast<Eigen::Index>(f.offsets[b + 1] - 1));
  }
  f.label_space = f.pooled * params_[action_projection_];
  f.label_space.rowwise() += params_[action_bias_].row(0);
  f.logits = f.label_space * params_[action_labels_].transpose();
  return f;
}

nn::Vector TedModel::action_probabilities(std::span<const StoryStep> history) const {
  const std::vector<StoryStep> window(history.begin(), history.end());
  const Forward f = forward(std::span(&window, 1));
  return nn::softmax_rows(f.logits).row(0).transpose();
}

PolicyPrediction TedModel::predict(std::span<const StoryStep> history) const {
  const nn::Vector probs = action_probabilities(history);
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  return {actions_[static_cast<std::size_t>(best)], probs[best], PolicyKind::Ted};
}

std::vector<TedExample> ted_examples(const TedModel& model, const StorySet& stories) {
  std::vector<TedExample> out;
  for (const Story& story : stories.stories) {
    for (StoryTarget& t : story_targets(story)) {
      const auto& actions = model.actions();
      const auto it = std::find(actions.begin(), actions.end(), t.action);
      if (it == actions.end()) {
        throw Error(ErrorCode::UnknownActionInStory,
                    "story `" + story.name + "` uses unknown action `" + t.action + "`");
      }
      out.push_back({std::move(t.history), static_cast<int>(it - actions.begin())});
    }
  }
  return out;
}

struct TedLoss {
  static LossResult compute(const TedModel& model, std::span<const TedExample> batch) {
    if (batch.empty()) throw Error(ErrorCode::EmptyStorySet, "empty batch");
    std::vector<std::vector<StoryStep>> windows;
    std::vector<int> targets;
    for (const TedExample& ex : batch) {
      windows.push_back(ex.window);
      targets.push_back(ex.action);
    }
    const TedModel::Forward f = model.forward(windows);
    const nn::ParameterSet& p = model.params_;

    LossResult out;
    out.gradients = p.zeros_like();
    nn::ParameterSet& g = out.gradients;
    nn::Matrix dlogits;
    out.intent_loss = nn::softmax_cross_entropy(f.logits, targets, 1.0, dlogits);
    out.loss = out.intent_loss;
    if (!std::isfinite(out.loss)) throw Error(ErrorCode::NonFiniteLoss, "loss is not finite");

    g[model.action_labels_].noalias() += dlogits.transpose() * f.label_space;
    const nn::Matrix dlabel = dlogits * p[model.action_labels_];
    g[model.action_projection_].noalias() += f.pooled.transpose() * dlabel;
    g[model.action_bias_].row(0) += dlabel.colwise().sum();
    const nn::Matrix dpooled = dlabel * p[model.action_projection_].transpose();

    nn::Matrix dencoded = nn::Matrix::Zero(f.encoded.rows(), f.encoded.cols());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      dencoded.row(static_cast<Eigen::Index>(f.offsets[b + 1] - 1)) =
          dpooled.row(static_cast<Eigen::Index>(b));
    }
    const nn::Matrix dembedded =
        model.encoder_.backward(p, dencoded, f.offsets, f.encoder_cache, g);
    g[model.turn_projection_].noalias() += f.turns.transpose() * dembedded;
    g[model.turn_bias_].row(0) += dembedded.colwise().sum();
    for (Eigen::Index r = 0; r < dembedded.rows(); ++r) {
      g[model.position_].row(static_cast<Eigen::Index>(f.positions[static_cast<std::size_t>(r)])) +=
          dembedded.row(r);
    }
    return out;
  }
};

LossResult ted_loss_and_gradients(const TedModel& model, std::span<const TedExample> batch) {
  return TedLoss::compute(model, batch);
}

TedTrainResult train_ted(const StorySet& stories, const Domain& domain,
                         const PolicyConfig& config) {
  config.validate();
  if (stories.stories.empty()) throw Error(ErrorCode::EmptyStorySet, "no stories to train on");
  std::vector<std::string> intents = domain.intents;
  if (std::find(intents.begin(), intents.end(), config.fallback_intent) == intents.end()) {
    intents.push_back(config.fallback_intent);
  }
  TedTrainResult result{TedModel(config, std::move(intents), domain.entity_types,
                                 policy_actions(domain)),
                        {}};
  TedModel& model = result.model;
  const std::vector<TedExample> examples = ted_examples(model, stories);
  if (examples.empty()) throw Error(ErrorCode::EmptyStorySet, "stories contain no actions");

  nn::Adam adam(model.params(), config.ted_learning_rate);
  for (std::size_t epoch = 0; epoch < config.ted_epochs; ++epoch) {
    LossResult step;
    try {
      step = ted_loss_and_gradients(model, examples);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonFiniteLoss) throw;
      throw Error(ErrorCode::NonFiniteLoss, "non-finite policy loss at epoch " +
                                                std::to_string(epoch));
    }
    result.loss_curve.push_back(step.loss);
    adam.step(model.params(), step.gradients);
  }
  return result;
}

}  // namespace bnlu
