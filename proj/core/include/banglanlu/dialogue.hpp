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

// Dialogue core: per-session trackers, the rule, memoization and learned
// (TED-style) policies, arbitration between them, and turn orchestration.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "banglanlu/corpus.hpp"
#include "banglanlu/diet.hpp"
#include "banglanlu/nn.hpp"
#include "banglanlu/pipeline.hpp"

namespace bnlu {

// --- events and tracker ------------------------------------------------------

struct UserUttered {
  std::string intent;
  std::vector<EntitySpan> entities;
  std::string text;
  IntentRanking ranking;

  friend bool operator==(const UserUttered&, const UserUttered&) = default;
};

struct BotUttered {
  std::string action;
  std::string text;

  friend bool operator==(const BotUttered&, const BotUttered&) = default;
};

struct ActionExecuted {
  std::string action;

  friend bool operator==(const ActionExecuted&, const ActionExecuted&) = default;
};

struct SessionStarted {
  friend bool operator==(const SessionStarted&, const SessionStarted&) = default;
};

using EventPayload = std::variant<UserUttered, BotUttered, ActionExecuted, SessionStarted>;

struct Event {
  std::uint64_t timestamp = 0;
  EventPayload payload;

  friend bool operator==(const Event&, const Event&) = default;
};

/// "user", "bot", "action" or "session_started".
std::string_view event_kind(const Event& event);

/// One JSON object per event: kind, timestamp and the payload fields.
std::string event_to_json(const Event& event);
/// Throws Error(ArchiveFormat) on malformed input.
Event event_from_json(std::string_view line);

/// Append-only record of one conversation. Not internally synchronised:
/// callers serialise access per session.
class Tracker {
 public:
  explicit Tracker(std::string session_id = {});

  const std::string& session_id() const { return session_id_; }
  const std::vector<Event>& events() const { return events_; }
  /// Entity type -> value of the most recent user entity of that type.
  const std::map<std::string, std::string>& slots() const { return slots_; }

  /// Throws Error(NonMonotonicTimestamp) unless the timestamp exceeds
  /// every existing one.
  void apply(Event event);
  /// Appends with the next counter value.
  void append(EventPayload payload);
  std::uint64_t next_timestamp() const;

  /// Dialogue turns since the last session start: user intents with their
  /// entity types and executed actions other than action_listen.
  std::vector<StoryStep> history() const;
  /// Intent of the most recent user turn, if any.
  std::optional<std::string> last_intent() const;

  /// Newline-delimited event log.
  std::string export_log() const;
  /// Rebuilds a tracker by applying every logged event in order.
  static Tracker replay(std::string session_id, std::string_view log);

 private:
  std::string session_id_;
  std::vector<Event> events_;
  std::map<std::string, std::string> slots_;
};

/// Functional form of Tracker::apply.
Tracker tracker_apply(Tracker tracker, Event event);

// --- policies ----------------------------------------------------------------

enum class PolicyKind { Rule, Memoization, Ted, None };

std::string_view to_string(PolicyKind kind);

struct PolicyPrediction {
  std::string action;
  double confidence = 0.0;
  PolicyKind policy = PolicyKind::None;

  friend bool operator==(const PolicyPrediction&, const PolicyPrediction&) = default;
};

struct PolicyConfig {
  std::size_t max_history = 5;
  std::size_t ted_epochs = 200;
  double ted_learning_rate = 0.05;
  std::size_t ted_transformer_layers = 2;
  std::uint64_t seed = 0;
  std::string fallback_intent = std::string(kDefaultFallbackIntent);

  /// Throws Error(ConfigError).
  void validate() const;
};

/// Story turns followed by the implicit listen points: after a bot action
/// that precedes a user turn or ends the story, the next action is
/// action_listen.
struct StoryTarget {
  std::vector<StoryStep> history;  // every turn before the prediction
  std::string action;
};
std::vector<StoryTarget> story_targets(const Story& story);

/// Exact lookup of the last `max_history` turns in the stories. Shorter
/// histories must match a story prefix; full windows may sit anywhere.
/// The earliest story in file order wins ties.
std::optional<PolicyPrediction> memoization_predict(std::span<const StoryStep> history,
                                                    const StorySet& stories,
                                                    std::size_t max_history);
std::optional<PolicyPrediction> memoization_predict(const Tracker& tracker,
                                                    const StorySet& stories,
                                                    std::size_t max_history);

/// The fallback intent maps to action_default_fallback; otherwise
/// single-turn rules (intent followed by actions) replay their actions and
/// then listen.
std::optional<PolicyPrediction> rule_predict(std::span<const StoryStep> history,
                                             const StorySet& stories,
                                             std::string_view fallback_intent);
std::optional<PolicyPrediction> rule_predict(const Tracker& tracker, const StorySet& stories,
                                             std::string_view fallback_intent);

/// Rule > Memoization > Ted. Absent or zero-confidence predictions are
/// skipped; with none left the result is action_listen from PolicyKind::None.
PolicyPrediction select_action(std::span<const std::optional<PolicyPrediction>> predictions);

// --- learned policy ----------------------------------------------------------

/// Fixed-window transformer classifier over multi-hot turn vectors with a
/// dot-product action head.
class TedModel {
 public:
  static constexpr std::size_t kWidth = 64;
  static constexpr std::size_t kHeads = 4;
  static constexpr std::size_t kLabelDim = 20;

  TedModel(const PolicyConfig& config, std::vector<std::string> intents,
           std::vector<std::string> entity_types, std::vector<std::string> actions);

  const PolicyConfig& config() const { return config_; }
  const std::vector<std::string>& intents() const { return intents_; }
  const std::vector<std::string>& entity_types() const { return entity_types_; }
  const std::vector<std::string>& actions() const { return actions_; }
  std::size_t turn_dim() const { return intents_.size() + entity_types_.size() + actions_.size(); }

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

  /// Multi-hot vector over intents, entity types and actions; unknown
  /// names contribute nothing.
  nn::Vector featurize_turn(const StoryStep& step) const;

  /// Softmax over actions() for the last max_history turns.
  nn::Vector action_probabilities(std::span<const StoryStep> history) const;
  PolicyPrediction predict(std::span<const StoryStep> history) const;

  struct Forward;
  Forward forward(std::span<const std::vector<StoryStep>> windows) const;

 private:
  friend struct TedLoss;

  PolicyConfig config_;
  std::vector<std::string> intents_;
  std::vector<std::string> entity_types_;
  std::vector<std::string> actions_;
  std::map<std::string, std::size_t, std::less<>> intent_index_;
  std::map<std::string, std::size_t, std::less<>> entity_index_;
  std::map<std::string, std::size_t, std::less<>> action_index_;
  nn::ParameterSet params_;
  nn::Encoder encoder_;
  std::size_t turn_projection_ = 0;
  std::size_t turn_bias_ = 0;
  std::size_t position_ = 0;
  std::size_t action_projection_ = 0;
  std::size_t action_bias_ = 0;
  std::size_t action_labels_ = 0;
};

struct TedModel::Forward {
  std::vector<std::size_t> offsets;  // row range per window, most recent turn last
  std::vector<std::size_t> positions;
  nn::Matrix turns;
  nn::Matrix embedded;
  nn::EncoderCache encoder_cache;
  nn::Matrix encoded;
  nn::Matrix pooled;
  nn::Matrix label_space;
  nn::Matrix logits;
};

struct TedExample {
  std::vector<StoryStep> window;
  int action = 0;
};

/// Every (window, next action) pair of every story, including the
/// implicit listen points.
std::vector<TedExample> ted_examples(const TedModel& model, const StorySet& stories);

/// Mean action cross-entropy and its gradient.
LossResult ted_loss_and_gradients(const TedModel& model, std::span<const TedExample> batch);

struct TedTrainResult {
  TedModel model;
  std::vector<double> loss_curve;
};

/// Full-batch Adam. Throws Error(EmptyStorySet).
TedTrainResult train_ted(const StorySet& stories, const Domain& domain,
                         const PolicyConfig& config);

/// Domain actions plus action_listen and action_default_fallback, listen
/// first, fallback second, the rest sorted.
std::vector<std::string> policy_actions(const Domain& domain);

// --- actions and turns -------------------------------------------------------

/// A custom (non-response) action. Implementations must be thread-safe.
class CustomAction {
 public:
  virtual ~CustomAction() = default;
  /// Bot messages to send; may be empty.
  virtual std::vector<std::string> run(const Tracker& tracker) const = 0;
};

/// Repeats the latest user text.
class EchoAction : public CustomAction {
 public:
  std::vector<std::string> run(const Tracker& tracker) const override;
};

class ActionRegistry {
 public:
  /// Holds action_echo.
  static ActionRegistry with_builtins();

  void add(std::string name, std::shared_ptr<const CustomAction> action);
  /// nullptr when unregistered; unregistered custom actions are no-ops.
  const CustomAction* find(std::string_view name) const;

 private:
  std::map<std::string, std::shared_ptr<const CustomAction>, std::less<>> actions_;
};

inline constexpr std::string_view kDefaultFallbackText =
    "দুঃখিত, আমি বুঝতে পারিনি। Sorry, I did not understand that.";
inline constexpr std::size_t kMaxActionsPerTurn = 10;

struct BotResponse {
  std::string action;
  std::string text;

  friend bool operator==(const BotResponse&, const BotResponse&) = default;
};

struct TurnResult {
  ParseResult parse;
  std::vector<PolicyPrediction> decisions;  // one per executed action, listen last
  std::vector<BotResponse> responses;
};

/// Trained dialogue policies plus the domain. Immutable after construction
/// and safe to share between sessions.
class DialogueAgent {
 public:
  DialogueAgent(Domain domain, StorySet stories, TedModel ted, std::uint64_t response_seed = 0);

  static DialogueAgent train(const Domain& domain, const StorySet& stories,
                             const PolicyConfig& config);

  const Domain& domain() const { return domain_; }
  const StorySet& stories() const { return stories_; }
  const TedModel& ted() const { return ted_; }
  const std::vector<double>& ted_loss_curve() const { return ted_loss_curve_; }
  ActionRegistry& actions() { return registry_; }

  /// Every policy's opinion, in Rule, Memoization, Ted order.
  std::vector<std::optional<PolicyPrediction>> predictions(const Tracker& tracker) const;
  PolicyPrediction next_action(const Tracker& tracker) const;

  /// Records an already parsed user message and runs actions until the
  /// agent listens. Throws Error(ActionLoopLimit) after kMaxActionsPerTurn.
  TurnResult handle(Tracker& tracker, ParseResult parse) const;
  /// Parses `text` with `nlu` first.
  TurnResult run_turn(Tracker& tracker, const NluPipeline& nlu, std::string_view text) const;

  std::string serialize() const;
  static DialogueAgent deserialize(std::string_view bytes);
  void save(const std::string& path) const;
  static DialogueAgent load(const std::string& path);

 private:
  std::vector<BotResponse> execute(Tracker& tracker, const std::string& action) const;

  Domain domain_;
  StorySet stories_;
  TedModel ted_;
  std::uint64_t response_seed_;
  std::vector<double> ted_loss_curve_;
  ActionRegistry registry_;
};

}  // namespace bnlu
