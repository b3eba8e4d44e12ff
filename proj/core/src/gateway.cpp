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

#include "banglanlu/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "banglanlu/errors.hpp"
#include "banglanlu/text.hpp"
#include "json.hpp"

namespace bnlu {

using nlohmann::json;

std::string_view to_string(Language language) {
  switch (language) {
    case Language::Bangla:
      return "bangla";
    case Language::LatinTransliteration:
      return "latin_transliteration";
    case Language::Other:
      return "other";
  }
  return "other";
}

namespace {

// Lenient UTF-8 walk: malformed sequences yield U+FFFD and resynchronise
// on the next byte.
std::u32string lenient_decode(std::string_view s) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + len > s.size()) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    char32_t cp = len == 1 ? b : b & (0x7F >> len);
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

}  // namespace

LanguageTag detect_language(std::string_view input) {
  std::size_t bangla = 0;
  std::size_t latin = 0;
  for (char32_t cp : lenient_decode(input)) {
    if (text::is_bangla_letter(cp)) {
      ++bangla;
    } else if (text::is_latin_letter(cp)) {
      ++latin;
    }
  }
  LanguageTag tag;
  if (bangla + latin == 0) return tag;
  tag.bangla_ratio = static_cast<double>(bangla) / static_cast<double>(bangla + latin);
  tag.language = tag.bangla_ratio >= 0.5 ? Language::Bangla : Language::LatinTransliteration;
  return tag;
}

std::string IdentityTransliterator::transliterate(std::string_view latin) const {
  return std::string(latin);
}

RuleTableTransliterator::RuleTableTransliterator(
    std::vector<std::pair<std::string, std::string>> rules) {
  for (auto& [from, to] : rules) {
    if (from.empty()) continue;
    longest_ = std::max(longest_, from.size());
    rules_[text::ascii_lower(from)] = std::move(to);
  }
}

RuleTableTransliterator RuleTableTransliterator::standard() {
  return RuleTableTransliterator({
      {"kh", "খ"}, {"gh", "ঘ"}, {"ch", "চ"}, {"jh", "ঝ"}, {"th", "থ"}, {"dh", "ধ"},
      {"ph", "ফ"}, {"bh", "ভ"}, {"sh", "শ"}, {"ng", "ং"}, {"aa", "আ"}, {"ee", "ঈ"},
      {"oo", "ঊ"}, {"oi", "ঐ"}, {"ou", "ঔ"}, {"a", "আ"},  {"b", "ব"},  {"c", "ক"},
      {"d", "দ"},  {"e", "এ"},  {"f", "ফ"},  {"g", "গ"},  {"h", "হ"},  {"i", "ই"},
      {"j", "জ"},  {"k", "ক"},  {"l", "ল"},  {"m", "ম"},  {"n", "ন"},  {"o", "ও"},
      {"p", "প"},  {"q", "ক"},  {"r", "র"},  {"s", "স"},  {"t", "ত"},  {"u", "উ"},
      {"v", "ভ"},  {"w", "ও"},  {"x", "ক্স"}, {"y", "য়"},  {"z", "জ"},
  });
}

std::string RuleTableTransliterator::transliterate(std::string_view latin) const {
  std::string out;
  std::size_t i = 0;
  while (i < latin.size()) {
    bool matched = false;
    for (std::size_t len = std::min(longest_, latin.size() - i); len > 0; --len) {
      const auto it = rules_.find(text::ascii_lower(latin.substr(i, len)));
      if (it != rules_.end()) {
        out += it->second;
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) out += latin[i++];
  }
  return out;
}

std::shared_ptr<const TransliterationClient> make_transliterator(std::string_view name) {
  if (name == "identity") return std::make_shared<IdentityTransliterator>();
  if (name == "rule_table") {
    return std::make_shared<RuleTableTransliterator>(RuleTableTransliterator::standard());
  }
  throw Error(ErrorCode::ConfigError, "unknown transliterator `" + std::string(name) + "`");
}

RoutedMessage route_message(std::string_view input, const TransliterationClient& client) {
  RoutedMessage out;
  out.language = detect_language(input);
  out.text = std::string(input);
  switch (out.language.language) {
    case Language::Bangla:
      break;
    case Language::Other:
      out.unrouted = true;
      break;
    case Language::LatinTransliteration:
      try {
        out.text = client.transliterate(input);
      } catch (const std::exception& e) {
        out.transliteration_failed = true;
        out.warning = std::string("transliteration failed: ") + e.what();
      }
      break;
  }
  return out;
}

// --- configuration -----------------------------------------------------------

GatewayConfig GatewayConfig::parse(std::string_view contents) {
  GatewayConfig c;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    const std::string line = text::trim(contents.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = text::trim(std::string_view(line).substr(0, eq));
    const std::string value = text::trim(std::string_view(line).substr(eq + 1));
    if (key == "host") {
      c.host = value;
    } else if (key == "port") {
      char* rest = nullptr;
      const long port = std::strtol(value.c_str(), &rest, 10);
      if (value.empty() || *rest != '\0' || port < 0 || port > 65535) {
        throw Error(ErrorCode::ConfigError, "port must be an integer in [0, 65535]");
      }
      c.port = static_cast<int>(port);
    } else if (key == "model_dir") {
      c.model_dir = value;
    } else if (key == "feedback_log") {
      c.feedback_log = value;
    } else if (key == "transliterator") {
      make_transliterator(value);
      c.transliterator = value;
    } else {
      throw Error(ErrorCode::ConfigError, "unknown gateway key `" + key + "`");
    }
  }
  return c;
}

GatewayConfig GatewayConfig::load(const std::string& path) { return parse(read_file(path)); }

void GatewayConfig::apply_environment() {
  if (const char* port_env = std::getenv("BNLU_PORT"); port_env != nullptr && *port_env != '\0') {
    port = parse(std::string("port = ") + port_env).port;
  }
  if (const char* model = std::getenv("BNLU_MODEL"); model != nullptr && *model != '\0') {
    model_dir = model;
  }
}

// --- service -----------------------------------------------------------------

namespace {

HttpResponse json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

HttpResponse error_response(int status, std::string_view message) {
  return json_response(status, json{{"error", message}});
}

std::optional<json> parse_body(std::string_view body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) return std::nullopt;
    return j;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

const json* string_member(const json& j, const char* key) {
  const auto it = j.find(key);
  return it != j.end() && it->is_string() ? &*it : nullptr;
}

json entities_json(const std::vector<EntitySpan>& entities) {
  json out = json::array();
  for (const EntitySpan& e : entities) {
    out.push_back({{"entity", e.entity}, {"value", e.value}, {"start", e.start}, {"end", e.end}});
  }
  return out;
}

// Messages are the user and bot utterances of a tracker, in event order.
std::vector<std::size_t> message_events(const Tracker& tracker) {
  std::vector<std::size_t> out;
  const auto& events = tracker.events();
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (std::holds_alternative<UserUttered>(events[i].payload) ||
        std::holds_alternative<BotUttered>(events[i].payload)) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace

Gateway::Gateway(GatewayConfig config, std::shared_ptr<const TransliterationClient> client)
    : config_(std::move(config)),
      client_(client ? std::move(client) : make_transliterator(config_.transliterator)) {}

void Gateway::set_models(std::shared_ptr<const NluPipeline> nlu,
                         std::shared_ptr<const DialogueAgent> agent) {
  std::lock_guard lock(models_mutex_);
  nlu_ = std::move(nlu);
  agent_ = std::move(agent);
}

void Gateway::load_models() {
  const std::filesystem::path dir(config_.model_dir);
  auto nlu = std::make_shared<const NluPipeline>(NluPipeline::load((dir / kNluModelFile).string()));
  auto agent =
      std::make_shared<const DialogueAgent>(DialogueAgent::load((dir / kCoreModelFile).string()));
  set_models(std::move(nlu), std::move(agent));
}

bool Gateway::model_loaded() const {
  std::lock_guard lock(models_mutex_);
  return nlu_ != nullptr && agent_ != nullptr;
}

std::pair<std::shared_ptr<const NluPipeline>, std::shared_ptr<const DialogueAgent>>
Gateway::models() const {
  std::lock_guard lock(models_mutex_);
  return {nlu_, agent_};
}

std::shared_ptr<Gateway::Session> Gateway::find_session(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<Gateway::Session> Gateway::session(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto& slot = sessions_[id];
  if (!slot) {
    slot = std::make_shared<Session>();
    slot->tracker = Tracker(id);
    slot->tracker.append(SessionStarted{});
  }
  return slot;
}

HttpResponse Gateway::handle_parse(std::string_view body) const {
  const auto request = parse_body(body);
  const json* text = request ? string_member(*request, "text") : nullptr;
  if (text == nullptr) return error_response(400, "body must be an object with a string `text`");
  if (text->get_ref<const std::string&>().empty()) return error_response(400, "text is empty");
  const auto [nlu, agent] = models();
  if (!nlu) return error_response(503, "model not loaded");

  const RoutedMessage routed = route_message(text->get_ref<const std::string&>(), *client_);
  const ParseResult r = nlu->parse(routed.text);
  json ranking = json::array();
  for (const IntentScore& s : r.ranking) {
    ranking.push_back({{"name", s.intent}, {"confidence", s.confidence}});
  }
  json out = {{"text", text->get<std::string>()},
              {"routed_text", routed.text},
              {"intent", r.intent()},
              {"confidence", r.confidence()},
              {"intent_ranking", std::move(ranking)},
              {"entities", entities_json(r.entities)},
              {"fallback", to_string(r.fallback)},
              {"language",
               {{"tag", to_string(routed.language.language)},
                {"bangla_ratio", routed.language.bangla_ratio}}}};
  if (!routed.warning.empty()) out["warning"] = routed.warning;
  return json_response(200, out);
}

HttpResponse Gateway::handle_webhook(std::string_view body) {
  const auto request = parse_body(body);
  const json* sender = request ? string_member(*request, "sender") : nullptr;
  const json* message = request ? string_member(*request, "message") : nullptr;
  if (sender == nullptr || message == nullptr) {
    return error_response(400, "body must carry string `sender` and `message`");
  }
  if (sender->get_ref<const std::string&>().empty() ||
      message->get_ref<const std::string&>().empty()) {
    return error_response(400, "sender and message must be non-empty");
  }
  const auto [nlu, agent] = models();
  if (!nlu || !agent) return error_response(503, "model not loaded");

  const std::string& id = sender->get_ref<const std::string&>();
  const RoutedMessage routed = route_message(message->get_ref<const std::string&>(), *client_);
  const std::shared_ptr<Session> s = session(id);
  std::lock_guard lock(s->mutex);
  try {
    const TurnResult turn = agent->run_turn(s->tracker, *nlu, routed.text);
    json out = json::array();
    for (const BotResponse& r : turn.responses) {
      out.push_back({{"recipient_id", id}, {"text", r.text}});
    }
    return json_response(200, out);
  } catch (const Error& e) {
    return error_response(500, std::string(error_name(e.code())) + ": " + e.what());
  }
}

HttpResponse Gateway::handle_status() const {
  const auto [nlu, agent] = models();
  return json_response(200, json{{"model_loaded", nlu != nullptr && agent != nullptr},
                                 {"pipeline", nlu ? nlu->config().name : std::string()}});
}

HttpResponse Gateway::handle_tracker(const std::string& session_id) const {
  const std::shared_ptr<Session> s = find_session(session_id);
  if (!s) return error_response(404, "unknown session");
  std::lock_guard lock(s->mutex);
  json events = json::array();
  for (const Event& e : s->tracker.events()) events.push_back(json::parse(event_to_json(e)));
  json messages = json::array();
  for (std::size_t index : message_events(s->tracker)) messages.push_back(index);
  return json_response(200, json{{"session_id", session_id},
                                 {"events", std::move(events)},
                                 {"message_events", std::move(messages)},
                                 {"slots", s->tracker.slots()}});
}

HttpResponse Gateway::handle_feedback(const std::string& session_id, std::string_view body) {
  const std::shared_ptr<Session> s = find_session(session_id);
  if (!s) return error_response(404, "unknown session");
  const auto request = parse_body(body);
  if (!request) return error_response(400, "body must be a JSON object");
  const auto index_it = request->find("message_index");
  const json* verdict = string_member(*request, "verdict");
  if (index_it == request->end() || !index_it->is_number_unsigned() || verdict == nullptr ||
      (*verdict != "correct" && *verdict != "wrong")) {
    return error_response(400,
                          "expected non-negative integer `message_index` and verdict "
                          "`correct` or `wrong`");
  }
  FeedbackEntry entry;
  entry.session_id = session_id;
  entry.message_index = index_it->get<std::size_t>();
  entry.verdict = verdict->get<std::string>();
  entry.timestamp = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
  {
    std::lock_guard lock(s->mutex);
    if (entry.message_index >= message_events(s->tracker).size()) {
      return error_response(400, "message_index does not refer to a message");
    }
  }
  std::lock_guard lock(feedback_mutex_);
  if (!config_.feedback_log.empty()) {
    std::ofstream log(config_.feedback_log, std::ios::app | std::ios::binary);
    if (!log) return error_response(500, "cannot open feedback log");
    log << json{{"session_id", entry.session_id},
                {"message_index", entry.message_index},
                {"verdict", entry.verdict},
                {"timestamp", entry.timestamp}}
               .dump()
        << '\n';
  }
  feedback_.push_back(std::move(entry));
  return {204, "", "application/json"};
}

std::vector<FeedbackEntry> Gateway::feedback() const {
  std::lock_guard lock(feedback_mutex_);
  return feedback_;
}

std::vector<std::string> Gateway::session_ids() const {
  std::lock_guard lock(sessions_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

HttpResponse Gateway::handle(std::string_view method, std::string_view path,
                             std::string_view body) {
  const auto only = [&](std::string_view allowed, auto&& fn) -> HttpResponse {
    if (method != allowed) return error_response(405, "method not allowed");
    return fn();
  };
  if (path == "/model/parse") return only("POST", [&] { return handle_parse(body); });
  if (path == "/webhooks/rest") return only("POST", [&] { return handle_webhook(body); });
  if (path == "/status") return only("GET", [&] { return handle_status(); });
  constexpr std::string_view prefix = "/sessions/";
  if (path.starts_with(prefix)) {
    const std::string_view rest = path.substr(prefix.size());
    const std::size_t slash = rest.rfind('/');
    if (slash != std::string_view::npos && slash > 0) {
      const std::string id(rest.substr(0, slash));
      const std::string_view leaf = rest.substr(slash + 1);
      if (leaf == "tracker") return only("GET", [&] { return handle_tracker(id); });
      if (leaf == "feedback") return only("POST", [&] { return handle_feedback(id, body); });
    }
  }
  return error_response(404, "no such endpoint");
}

}  // namespace bnlu
