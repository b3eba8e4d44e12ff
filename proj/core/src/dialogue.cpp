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

#include "banglanlu/dialogue.hpp"

#include <algorithm>
#include <utility>

#include "archive.hpp"
#include "banglanlu/errors.hpp"
#include "json.hpp"

namespace bnlu {

using nlohmann::json;

// --- events ------------------------------------------------------------------

std::string_view event_kind(const Event& event) {
  struct Visitor {
    std::string_view operator()(const UserUttered&) const { return "user"; }
    std::string_view operator()(const BotUttered&) const { return "bot"; }
    std::string_view operator()(const ActionExecuted&) const { return "action"; }
    std::string_view operator()(const SessionStarted&) const { return "session_started"; }
  };
  return std::visit(Visitor{}, event.payload);
}

namespace {

json entities_to_json(const std::vector<EntitySpan>& entities) {
  json out = json::array();
  for (const EntitySpan& e : entities) {
    out.push_back({{"start", e.start}, {"end", e.end}, {"entity", e.entity}, {"value", e.value}});
  }
  return out;
}

std::vector<EntitySpan> entities_from_json(const json& j) {
  std::vector<EntitySpan> out;
  for (const json& e : j) {
    out.push_back({archive::field<std::size_t>(e, "start"), archive::field<std::size_t>(e, "end"),
                   archive::field<std::string>(e, "entity"),
                   archive::field<std::string>(e, "value")});
  }
  return out;
}

std::vector<std::string> entity_types_of(const std::vector<EntitySpan>& entities) {
  std::vector<std::string> types;
  for (const EntitySpan& e : entities) types.push_back(e.entity);
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  return types;
}

}  // namespace

std::string event_to_json(const Event& event) {
  json j = {{"kind", event_kind(event)}, {"timestamp", event.timestamp}};
  if (const auto* u = std::get_if<UserUttered>(&event.payload)) {
    j["intent"] = u->intent;
    j["entities"] = entities_to_json(u->entities);
    j["text"] = u->text;
    json ranking = json::array();
    for (const IntentScore& s : u->ranking) {
      ranking.push_back({{"intent", s.intent}, {"confidence", s.confidence}});
    }
    j["ranking"] = std::move(ranking);
  } else if (const auto* b = std::get_if<BotUttered>(&event.payload)) {
    j["action"] = b->action;
    j["text"] = b->text;
  } else if (const auto* a = std::get_if<ActionExecuted>(&event.payload)) {
    j["action"] = a->action;
  }
  return j.dump();
}

Event event_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ArchiveFormat, std::string("malformed event: ") + e.what());
  }
  Event event;
  event.timestamp = archive::field<std::uint64_t>(j, "timestamp");
  const auto kind = archive::field<std::string>(j, "kind");
  if (kind == "user") {
    UserUttered u;
    u.intent = archive::field<std::string>(j, "intent");
    u.text = archive::field<std::string>(j, "text");
    if (j.contains("entities")) u.entities = entities_from_json(j.at("entities"));
    if (j.contains("ranking")) {
      for (const json& s : j.at("ranking")) {
        u.ranking.push_back(
            {archive::field<std::string>(s, "intent"), archive::field<double>(s, "confidence")});
      }
    }
    event.payload = std::move(u);
  } else if (kind == "bot") {
    event.payload = BotUttered{archive::field<std::string>(j, "action"),
                               archive::field<std::string>(j, "text")};
  } else if (kind == "action") {
    event.payload = ActionExecuted{archive::field<std::string>(j, "action")};
  } else if (kind == "session_started") {
    event.payload = SessionStarted{};
  } else {
    throw Error(ErrorCode::ArchiveFormat, "unknown event kind `" + kind + "`");
  }
  return event;
}

// --- tracker -----------------------------------------------------------------

Tracker::Tracker(std::string session_id) : session_id_(std::move(session_id)) {}

void Tracker::apply(Event event) {
  if (!events_.empty() && event.timestamp <= events_.back().timestamp) {
    throw Error(ErrorCode::NonMonotonicTimestamp,
                "event timestamp " + std::to_string(event.timestamp) + " does not exceed " +
                    std::to_string(events_.back().timestamp));
  }
  if (const auto* u = std::get_if<UserUttered>(&event.payload)) {
    for (const EntitySpan& e : u->entities) slots_[e.entity] = e.value;
  }
  events_.push_back(std::move(event));
}

void Tracker::append(EventPayload payload) { apply(Event{next_timestamp(), std::move(payload)}); }

std::uint64_t Tracker::next_timestamp() const {
  return events_.empty() ? 1 : events_.back().timestamp + 1;
}

std::vector<StoryStep> Tracker::history() const {
  std::vector<StoryStep> steps;
  for (const Event& event : events_) {
    if (const auto* u = std::get_if<UserUttered>(&event.payload)) {
      steps.push_back({StoryStep::Kind::User, u->intent, entity_types_of(u->entities)});
    } else if (const auto* a = std::get_if<ActionExecuted>(&event.payload)) {
      if (a->action != kActionListen) steps.push_back({StoryStep::Kind::Action, a->action, {}});
    } else if (std::holds_alternative<SessionStarted>(event.payload)) {
      steps.clear();
    }
  }
  return steps;
}

std::optional<std::string> Tracker::last_intent() const {
  for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
    if (const auto* u = std::get_if<UserUttered>(&it->payload)) return u->intent;
  }
  return std::nullopt;
}

std::string Tracker::export_log() const {
  std::string out;
  for (const Event& event : events_) {
    out += event_to_json(event);
    out += '\n';
  }
  return out;
}

Tracker Tracker::replay(std::string session_id, std::string_view log) {
  Tracker tracker(std::move(session_id));
  std::size_t pos = 0;
  while (pos < log.size()) {
    std::size_t end = log.find('\n', pos);
    if (end == std::string_view::npos) end = log.size();
    const std::string_view line = log.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      tracker.apply(event_from_json(line));
    }
    pos = end + 1;
  }
  return tracker;
}

Tracker tracker_apply(Tracker tracker, Event event) {
  tracker.apply(std::move(event));
  return tracker;
}

// --- policies ----------------------------------------------------------------

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Rule:
      return "rule";
    case PolicyKind::Memoization:
      return "memoization";
    case PolicyKind::Ted:
      return "ted";
    case PolicyKind::None:
      return "none";
  }
  return "none";
}

void PolicyConfig::validate() const {
  if (max_history < 1) throw Error(ErrorCode::ConfigError, "max_history must be at least 1");
  if (ted_epochs < 1) throw Error(ErrorCode::ConfigError, "ted_epochs must be at least 1");
  if (!(ted_learning_rate > 0.0)) {
    throw Error(ErrorCode::ConfigError, "ted_learning_rate must be positive");
  }
  if (fallback_intent.empty()) throw Error(ErrorCode::ConfigError, "fallback intent is empty");
}

std::vector<StoryTarget> story_targets(const Story& story) {
  std::vector<StoryTarget> out;
  std::vector<StoryStep> history;
  for (const StoryStep& step : story.steps) {
    if (!step.is_user()) {
      out.push_back({history, step.name});
    } else if (!history.empty() && !history.back().is_user()) {
      out.push_back({history, std::string(kActionListen)});
    }
    history.push_back(step);
  }
  if (!history.empty() && !history.back().is_user()) {
    out.push_back({history, std::string(kActionListen)});
  }
  return out;
}

namespace {

// A story step matches a tracker turn on kind and name; entity types
// listed on a story step must all be present.
bool step_matches(const StoryStep& story, const StoryStep& seen) {
  if (story.kind != seen.kind || story.name != seen.name) return false;
  return std::all_of(story.entities.begin(), story.entities.end(), [&](const std::string& e) {
    return std::find(seen.entities.begin(), seen.entities.end(), e) != seen.entities.end();
  });
}

bool window_matches(std::span<const StoryStep> story, std::size_t at,
                    std::span<const StoryStep> key) {
  if (at + key.size() > story.size()) return false;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (!step_matches(story[at + i], key[i])) return false;
  }
  return true;
}

// Action following story[0, end): the next bot step, action_listen after
// a bot step that precedes a user turn or the end, otherwise nothing.
std::optional<std::string> next_action(std::span<const StoryStep> story, std::size_t end) {
  if (end < story.size() && !story[end].is_user()) return story[end].name;
  if (end > 0 && !story[end - 1].is_user()) return std::string(kActionListen);
  return std::nullopt;
}

}  // namespace

std::optional<PolicyPrediction> memoization_predict(std::span<const StoryStep> history,
                                                    const StorySet& stories,
                                                    std::size_t max_history) {
  if (history.empty() || max_history == 0) return std::nullopt;
  const bool full = history.size() >= max_history;
  const auto key = full ? history.subspan(history.size() - max_history) : history;
  for (const Story& story : stories.stories) {
    const std::span<const StoryStep> steps(story.steps);
    const std::size_t last_start = full ? steps.size() : 0;
    for (std::size_t at = 0; at <= last_start && at + key.size() <= steps.size(); ++at) {
      if (!window_matches(steps, at, key)) continue;
      if (auto action = next_action(steps, at + key.size())) {
        return PolicyPrediction{std::move(*action), 1.0, PolicyKind::Memoization};
      }
    }
  }
  return std::nullopt;
}

std::optional<PolicyPrediction> memoization_predict(const Tracker& tracker,
                                                    const StorySet& stories,
                                                    std::size_t max_history) {
  const auto history = tracker.history();
  return memoization_predict(history, stories, max_history);
}

std::optional<PolicyPrediction> rule_predict(std::span<const StoryStep> history,
                                             const StorySet& stories,
                                             std::string_view fallback_intent) {
  std::size_t user = history.size();
  for (std::size_t i = history.size(); i-- > 0;) {
    if (history[i].is_user()) {
      user = i;
      break;
    }
  }
  if (user == history.size()) return std::nullopt;
  const auto done = history.subspan(user + 1);

  const auto listen = PolicyPrediction{std::string(kActionListen), 1.0, PolicyKind::Rule};
  if (history[user].name == fallback_intent) {
    if (done.empty()) {
      return PolicyPrediction{std::string(kActionDefaultFallback), 1.0, PolicyKind::Rule};
    }
    return listen;
  }
  for (const Story& rule : stories.rules) {
    if (rule.steps.empty() || !step_matches(rule.steps.front(), history[user])) continue;
    const std::span<const StoryStep> actions = std::span(rule.steps).subspan(1);
    if (std::any_of(actions.begin(), actions.end(), [](const auto& s) { return s.is_user(); })) {
      continue;  // only single-turn rules
    }
    if (done.size() > actions.size() || !window_matches(actions, 0, done)) continue;
    if (done.size() == actions.size()) return listen;
    return PolicyPrediction{actions[done.size()].name, 1.0, PolicyKind::Rule};
  }
  return std::nullopt;
}

std::optional<PolicyPrediction> rule_predict(const Tracker& tracker, const StorySet& stories,
                                             std::string_view fallback_intent) {
  const auto history = tracker.history();
  return rule_predict(history, stories, fallback_intent);
}

PolicyPrediction select_action(std::span<const std::optional<PolicyPrediction>> predictions) {
  for (PolicyKind kind : {PolicyKind::Rule, PolicyKind::Memoization, PolicyKind::Ted}) {
    for (const auto& p : predictions) {
      if (p && p->policy == kind && p->confidence > 0.0) return *p;
    }
  }
  return {std::string(kActionListen), 1.0, PolicyKind::None};
}

// --- actions -----------------------------------------------------------------

std::vector<std::string> EchoAction::run(const Tracker& tracker) const {
  const auto& events = tracker.events();
  for (auto it = events.rbegin(); it != events.rend(); ++it) {
    if (const auto* u = std::get_if<UserUttered>(&it->payload)) return {u->text};
  }
  return {};
}

ActionRegistry ActionRegistry::with_builtins() {
  ActionRegistry registry;
  registry.add("action_echo", std::make_shared<EchoAction>());
  return registry;
}

void ActionRegistry::add(std::string name, std::shared_ptr<const CustomAction> action) {
  actions_[std::move(name)] = std::move(action);
}

const CustomAction* ActionRegistry::find(std::string_view name) const {
  const auto it = actions_.find(name);
  return it == actions_.end() ? nullptr : it->second.get();
}

// --- agent -------------------------------------------------------------------

DialogueAgent::DialogueAgent(Domain domain, StorySet stories, TedModel ted,
                             std::uint64_t response_seed)
    : domain_(std::move(domain)),
      stories_(std::move(stories)),
      ted_(std::move(ted)),
      response_seed_(response_seed),
      registry_(ActionRegistry::with_builtins()) {}

DialogueAgent DialogueAgent::train(const Domain& domain, const StorySet& stories,
                                   const PolicyConfig& config) {
  TedTrainResult trained = train_ted(stories, domain, config);
  DialogueAgent agent(domain, stories, std::move(trained.model), config.seed);
  agent.ted_loss_curve_ = std::move(trained.loss_curve);
  return agent;
}

std::vector<std::optional<PolicyPrediction>> DialogueAgent::predictions(
    const Tracker& tracker) const {
  const auto history = tracker.history();
  const PolicyConfig& config = ted_.config();
  return {rule_predict(history, stories_, config.fallback_intent),
          memoization_predict(history, stories_, config.max_history), ted_.predict(history)};
}

PolicyPrediction DialogueAgent::next_action(const Tracker& tracker) const {
  return select_action(predictions(tracker));
}

std::vector<BotResponse> DialogueAgent::execute(Tracker& tracker,
                                                const std::string& action) const {
  tracker.append(ActionExecuted{action});
  std::vector<std::string> texts;
  const auto variants = domain_.responses.find(action);
  if (variants != domain_.responses.end() && !variants->second.empty()) {
    // Rotate through the variants per session: the n-th use of a response
    // in this tracker picks variant (n + seed) mod count.
    std::size_t used = 0;
    for (const Event& e : tracker.events()) {
      const auto* b = std::get_if<BotUttered>(&e.payload);
      if (b != nullptr && b->action == action) ++used;
    }
    const std::size_t n = variants->second.size();
    texts.push_back(variants->second[(used + response_seed_ % n) % n]);
  } else if (action == kActionDefaultFallback) {
    texts.emplace_back(kDefaultFallbackText);
  } else if (const CustomAction* custom = registry_.find(action)) {
    texts = custom->run(tracker);
  }
  std::vector<BotResponse> out;
  for (std::string& text : texts) {
    tracker.append(BotUttered{action, text});
    out.push_back({action, std::move(text)});
  }
  return out;
}

TurnResult DialogueAgent::handle(Tracker& tracker, ParseResult parse) const {
  TurnResult result;
  tracker.append(UserUttered{parse.intent(), parse.entities, parse.text, parse.ranking});
  result.parse = std::move(parse);
  for (std::size_t step = 0;; ++step) {
    PolicyPrediction decision = next_action(tracker);
    if (decision.action == kActionListen) {
      tracker.append(ActionExecuted{std::string(kActionListen)});
      result.decisions.push_back(std::move(decision));
      return result;
    }
    if (step == kMaxActionsPerTurn) {
      throw Error(ErrorCode::ActionLoopLimit,
                  "no action_listen after " + std::to_string(kMaxActionsPerTurn) +
                      " actions; last proposal `" + decision.action + "`");
    }
    auto responses = execute(tracker, decision.action);
    result.responses.insert(result.responses.end(), std::make_move_iterator(responses.begin()),
                            std::make_move_iterator(responses.end()));
    result.decisions.push_back(std::move(decision));
  }
}

TurnResult DialogueAgent::run_turn(Tracker& tracker, const NluPipeline& nlu,
                                   std::string_view text) const {
  return handle(tracker, nlu.parse(text));
}

namespace {

json steps_to_json(const std::vector<StoryStep>& steps) {
  json out = json::array();
  for (const StoryStep& s : steps) {
    out.push_back({{"kind", s.is_user() ? "user" : "action"},
                   {"name", s.name},
                   {"entities", s.entities}});
  }
  return out;
}

std::vector<Story> stories_from_json(const json& j) {
  std::vector<Story> out;
  for (const json& sj : j) {
    Story story;
    story.name = archive::field<std::string>(sj, "name");
    for (const json& step : sj.at("steps")) {
      StoryStep s;
      s.kind = archive::field<std::string>(step, "kind") == "user" ? StoryStep::Kind::User
                                                                   : StoryStep::Kind::Action;
      s.name = archive::field<std::string>(step, "name");
      s.entities = archive::field<std::vector<std::string>>(step, "entities");
      story.steps.push_back(std::move(s));
    }
    out.push_back(std::move(story));
  }
  return out;
}

json stories_to_json(const std::vector<Story>& stories) {
  json out = json::array();
  for (const Story& s : stories) out.push_back({{"name", s.name}, {"steps", steps_to_json(s.steps)}});
  return out;
}

}  // namespace

std::string DialogueAgent::serialize() const {
  const PolicyConfig& c = ted_.config();
  json h;
  h["kind"] = "dialogue_agent";
  h["domain"] = serialize_domain(domain_);
  h["stories"] = stories_to_json(stories_.stories);
  h["rules"] = stories_to_json(stories_.rules);
  h["policy"] = {{"max_history", c.max_history},
                 {"ted_epochs", c.ted_epochs},
                 {"ted_learning_rate", c.ted_learning_rate},
                 {"ted_transformer_layers", c.ted_transformer_layers},
                 {"seed", c.seed},
                 {"fallback_intent", c.fallback_intent}};
  h["ted"] = {{"intents", ted_.intents()},
              {"entity_types", ted_.entity_types()},
              {"actions", ted_.actions()}};
  h["response_seed"] = response_seed_;
  h["ted_loss_curve"] = ted_loss_curve_;
  return archive::write(std::move(h), ted_.params());
}

DialogueAgent DialogueAgent::deserialize(std::string_view bytes) {
  archive::Contents c = archive::read(bytes);
  if (archive::field<std::string>(c.header, "kind") != "dialogue_agent") {
    throw Error(ErrorCode::ArchiveFormat, "archive does not hold a dialogue agent");
  }
  try {
    const json& pj = c.header.at("policy");
    PolicyConfig config;
    config.max_history = archive::field<std::size_t>(pj, "max_history");
    config.ted_epochs = archive::field<std::size_t>(pj, "ted_epochs");
    config.ted_learning_rate = archive::field<double>(pj, "ted_learning_rate");
    config.ted_transformer_layers = archive::field<std::size_t>(pj, "ted_transformer_layers");
    config.seed = archive::field<std::uint64_t>(pj, "seed");
    config.fallback_intent = archive::field<std::string>(pj, "fallback_intent");
    config.validate();
    const json& tj = c.header.at("ted");
    TedModel ted(config, archive::field<std::vector<std::string>>(tj, "intents"),
                 archive::field<std::vector<std::string>>(tj, "entity_types"),
                 archive::field<std::vector<std::string>>(tj, "actions"));
    archive::restore(ted.params(), c.tensors);
    StorySet stories;
    stories.stories = stories_from_json(c.header.at("stories"));
    stories.rules = stories_from_json(c.header.at("rules"));
    DialogueAgent agent(parse_domain_file(archive::field<std::string>(c.header, "domain")),
                        std::move(stories), std::move(ted),
                        archive::field<std::uint64_t>(c.header, "response_seed"));
    agent.ted_loss_curve_ = archive::field<std::vector<double>>(c.header, "ted_loss_curve");
    return agent;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ArchiveFormat, std::string("malformed dialogue archive: ") + e.what());
  }
}

void DialogueAgent::save(const std::string& path) const { write_file(path, serialize()); }

DialogueAgent DialogueAgent::load(const std::string& path) { return deserialize(read_file(path)); }

}  // namespace bnlu
