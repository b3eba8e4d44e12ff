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

// Deployment surface: script-based language detection, pluggable
// transliteration, and the HTTP-facing service that wraps the NLU
// pipeline and dialogue agent with per-session trackers and a feedback
// log.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "banglanlu/dialogue.hpp"
#include "banglanlu/pipeline.hpp"

namespace bnlu {

enum class Language { Bangla, LatinTransliteration, Other };

std::string_view to_string(Language language);

struct LanguageTag {
  Language language = Language::Other;
  /// Bengali letters over Bengali plus Latin letters; 0 without letters.
  double bangla_ratio = 0.0;
};

/// Total and pure; malformed UTF-8 bytes count as non-letters.
LanguageTag detect_language(std::string_view text);

class TransliterationClient {
 public:
  virtual ~TransliterationClient() = default;
  /// Throws Error(TransliterationFailure) when the backend fails.
  virtual std::string transliterate(std::string_view latin) const = 0;
  virtual std::string_view name() const = 0;
};

class IdentityTransliterator : public TransliterationClient {
 public:
  std::string transliterate(std::string_view latin) const override;
  std::string_view name() const override { return "identity"; }
};

/// Greedy longest-match replacement, left to right, ASCII case-insensitive;
/// characters without a mapping pass through.
class RuleTableTransliterator : public TransliterationClient {
 public:
  explicit RuleTableTransliterator(std::vector<std::pair<std::string, std::string>> rules);
  /// A small built-in digraph and letter map.
  static RuleTableTransliterator standard();

  std::string transliterate(std::string_view latin) const override;
  std::string_view name() const override { return "rule_table"; }

 private:
  std::map<std::string, std::string, std::less<>> rules_;
  std::size_t longest_ = 0;
};

/// "identity" or "rule_table"; throws Error(ConfigError) otherwise.
std::shared_ptr<const TransliterationClient> make_transliterator(std::string_view name);

struct RoutedMessage {
  std::string text;
  LanguageTag language;
  /// Set for Other-language input, which is passed through unchanged.
  bool unrouted = false;
  /// Set when the client failed; `text` is then the original input.
  bool transliteration_failed = false;
  std::string warning;
};

RoutedMessage route_message(std::string_view text, const TransliterationClient& client);

struct GatewayConfig {
  std::string host = "0.0.0.0";
  int port = 5005;
  /// Directory holding nlu.model and core.model.
  std::string model_dir;
  std::string feedback_log = "feedback.jsonl";
  std::string transliterator = "identity";

  /// key=value lines (`#` comments); unknown keys throw Error(ConfigError).
  static GatewayConfig parse(std::string_view contents);
  static GatewayConfig load(const std::string& path);
  /// BNLU_PORT and BNLU_MODEL override port and model_dir.
  void apply_environment();
};

inline constexpr std::string_view kNluModelFile = "nlu.model";
inline constexpr std::string_view kCoreModelFile = "core.model";

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct FeedbackEntry {
  std::string session_id;
  std::size_t message_index = 0;
  std::string verdict;
  std::int64_t timestamp = 0;
};

/// Request handlers independent of the transport. Thread-safe: requests
/// for one session are serialised, different sessions run in parallel,
/// models are shared read-only.
class Gateway {
 public:
  explicit Gateway(GatewayConfig config,
                   std::shared_ptr<const TransliterationClient> client = nullptr);

  void set_models(std::shared_ptr<const NluPipeline> nlu,
                  std::shared_ptr<const DialogueAgent> agent);
  /// Loads both archives from config().model_dir. Throws on failure.
  void load_models();
  bool model_loaded() const;
  const GatewayConfig& config() const { return config_; }

  /// Routes a request by method and path.
  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

  HttpResponse handle_parse(std::string_view body) const;
  HttpResponse handle_webhook(std::string_view body);
  HttpResponse handle_status() const;
  HttpResponse handle_tracker(const std::string& session_id) const;
  HttpResponse handle_feedback(const std::string& session_id, std::string_view body);

  std::vector<FeedbackEntry> feedback() const;
  std::vector<std::string> session_ids() const;

 private:
  struct Session {
    std::mutex mutex;
    Tracker tracker;
  };
  std::shared_ptr<Session> find_session(const std::string& id) const;
  std::shared_ptr<Session> session(const std::string& id);
  std::pair<std::shared_ptr<const NluPipeline>, std::shared_ptr<const DialogueAgent>> models()
      const;

  GatewayConfig config_;
  std::shared_ptr<const TransliterationClient> client_;
  mutable std::mutex models_mutex_;
  std::shared_ptr<const NluPipeline> nlu_;
  std::shared_ptr<const DialogueAgent> agent_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  mutable std::mutex feedback_mutex_;
  std::vector<FeedbackEntry> feedback_;
};

/// Blocks serving `gateway` over HTTP/1.1 until the process is stopped.
/// Throws Error(IoError) when the port cannot be bound.
void serve(Gateway& gateway, const std::string& host, int port);

}  // namespace bnlu
