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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "banglanlu/errors.hpp"
#include "banglanlu/gateway.hpp"
#include "banglanlu/rng.hpp"
#include "banglanlu/text.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace bnlu {
namespace {

using nlohmann::json;

std::string random_string(Rng& rng, const std::u32string& alphabet, std::size_t max_len) {
  std::u32string s;
  const std::size_t len = 1 + rng.below(max_len);
  for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
  return text::encode(s);
}

const std::u32string kBanglaLetters = U"অআইঈউএওকখগঘচছজঝটঠডঢতথদধনপফবভমযরলশষসহড়য়";
const std::u32string kBanglaMarks = U"ািীুূেোৌ্ং";
const std::u32string kLatin = U"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
const std::u32string kNeutral = U"0123456789০১২৩৪৫৬৭৮৯ .,!?।-+*/()";

TEST(DetectLanguage, Examples) {
  const LanguageTag bangla = detect_language("আমি ভালো আছি");
  EXPECT_EQ(bangla.language, Language::Bangla);
  EXPECT_DOUBLE_EQ(bangla.bangla_ratio, 1.0);
  const LanguageTag latin = detect_language("ami bhalo achi");
  EXPECT_EQ(latin.language, Language::LatinTransliteration);
  EXPECT_DOUBLE_EQ(latin.bangla_ratio, 0.0);
  EXPECT_EQ(detect_language("12345 !!").language, Language::Other);
  EXPECT_EQ(detect_language("").language, Language::Other);
}

TEST(DetectLanguage, MixedTextUsesTheRatio) {
  // Vowel signs count as Bengali letters: "ঢাকা" has four.
  EXPECT_EQ(detect_language("ঢাকা ab").language, Language::Bangla);
  EXPECT_EQ(detect_language("ঢাকা abcd").language, Language::Bangla);  // exactly one half
  EXPECT_EQ(detect_language("ঢাকা abcde").language, Language::LatinTransliteration);
  EXPECT_EQ(detect_language("ক abc").language, Language::LatinTransliteration);
  EXPECT_EQ(detect_language("\xff\xfe").language, Language::Other);
}

TEST(DetectLanguageProperty, ScriptClassesAreExact) {
  Rng rng(500);
  int errors = 0;
  for (int i = 0; i < 200; ++i) {
    std::string bangla = random_string(rng, kBanglaLetters, 8);
    bangla += random_string(rng, kBanglaMarks, 2) + " " + random_string(rng, kNeutral, 3);
    std::string latin = random_string(rng, kLatin, 8) + " " + random_string(rng, kNeutral, 3);
    const std::string other = random_string(rng, kNeutral, 10);
    errors += detect_language(bangla).language != Language::Bangla;
    errors += detect_language(latin).language != Language::LatinTransliteration;
    errors += detect_language(other).language != Language::Other;
    errors += detect_language(bangla + random_string(rng, kBanglaLetters, 4)).language !=
              Language::Bangla;
  }
  EXPECT_EQ(errors, 0);
}

TEST(DetectLanguageProperty, ConcatenatedBanglaStaysBangla) {
  Rng rng(501);
  for (int i = 0; i < 300; ++i) {
    const std::string a = random_string(rng, kBanglaLetters + kLatin.substr(0, 3), 12);
    const std::string b = random_string(rng, kBanglaLetters + kLatin.substr(0, 3), 12);
    if (detect_language(a).language == Language::Bangla &&
        detect_language(b).language == Language::Bangla) {
      EXPECT_EQ(detect_language(a + b).language, Language::Bangla) << a << " + " << b;
    }
    EXPECT_EQ(detect_language(a).bangla_ratio, detect_language(a).bangla_ratio);
  }
}

TEST(Transliteration, RuleTableAppliesLeftToRight) {
  const RuleTableTransliterator t({{"a", "আ"}, {"m", "ম"}, {"i", "ই"}});
  EXPECT_EQ(t.transliterate("ami"), "আমই");
  EXPECT_EQ(t.transliterate("AMI x"), "আমই x");
}

TEST(Transliteration, LongestMatchWins) {
  const RuleTableTransliterator t({{"k", "ক"}, {"kh", "খ"}, {"a", "া"}});
  EXPECT_EQ(t.transliterate("kha"), "খা");
  EXPECT_EQ(t.transliterate("ka"), "কা");
}

TEST(Transliteration, StandardTableAndFactory) {
  const auto standard = make_transliterator("rule_table");
  EXPECT_EQ(standard->name(), "rule_table");
  EXPECT_EQ(detect_language(standard->transliterate("ami bhalo achi")).language, Language::Bangla);
  EXPECT_EQ(make_transliterator("identity")->transliterate("ami"), "ami");
  EXPECT_THROW(make_transliterator("google"), Error);
}

class FailingTransliterator : public TransliterationClient {
 public:
  std::string transliterate(std::string_view) const override {
    throw Error(ErrorCode::TransliterationFailure, "backend down");
  }
  std::string_view name() const override { return "failing"; }
};

TEST(Routing, EachLanguagePath) {
  const IdentityTransliterator identity;
  const RuleTableTransliterator table({{"a", "আ"}, {"m", "ম"}, {"i", "ই"}});
  EXPECT_EQ(route_message("আমি ভালো", table).text, "আমি ভালো");
  EXPECT_EQ(route_message("ami", identity).text, "ami");
  EXPECT_EQ(route_message("ami", table).text, "আমই");
  const RoutedMessage other = route_message("123", table);
  EXPECT_TRUE(other.unrouted);
  EXPECT_EQ(other.text, "123");
}

TEST(Routing, ClientFailureFallsThrough) {
  const RoutedMessage r = route_message("ami", FailingTransliterator{});
  EXPECT_TRUE(r.transliteration_failed);
  EXPECT_EQ(r.text, "ami");
  EXPECT_FALSE(r.warning.empty());
}

TEST(GatewayConfigFile, ParseAndEnvironment) {
  GatewayConfig c = GatewayConfig::parse(
      "# comment\nhost = 127.0.0.1\nport = 6000\nmodel_dir = models\n"
      "feedback_log = fb.jsonl\ntransliterator = rule_table\n");
  EXPECT_EQ(c.host, "127.0.0.1");
  EXPECT_EQ(c.port, 6000);
  EXPECT_EQ(c.transliterator, "rule_table");
  ::setenv("BNLU_PORT", "7001", 1);
  ::setenv("BNLU_MODEL", "/tmp/other", 1);
  c.apply_environment();
  ::unsetenv("BNLU_PORT");
  ::unsetenv("BNLU_MODEL");
  EXPECT_EQ(c.port, 7001);
  EXPECT_EQ(c.model_dir, "/tmp/other");
  EXPECT_THROW(GatewayConfig::parse("colour = blue\n"), Error);
  EXPECT_THROW(GatewayConfig::parse("port = many\n"), Error);
}

class GatewayTest : public ::testing::Test {
 protected:
  testing::TempDir dir{"gateway"};
  std::unique_ptr<Gateway> gateway;

  void SetUp() override {
    GatewayConfig config;
    config.feedback_log = dir.file("feedback.jsonl");
    gateway = std::make_unique<Gateway>(config);
  }

  void load() {
    gateway->set_models(std::make_shared<NluPipeline>(testing::tiny_pipeline()),
                        std::make_shared<DialogueAgent>(testing::tiny_agent()));
  }

  HttpResponse post(const std::string& path, const json& body) {
    return gateway->handle("POST", path, body.dump());
  }
};

TEST_F(GatewayTest, NothingWorksBeforeModelsLoad) {
  EXPECT_EQ(post("/model/parse", {{"text", "hello"}}).status, 503);
  EXPECT_EQ(post("/webhooks/rest", {{"sender", "a"}, {"message", "hello"}}).status, 503);
  const HttpResponse status = gateway->handle("GET", "/status", "");
  EXPECT_EQ(status.status, 200);
  EXPECT_EQ(json::parse(status.body)["model_loaded"], false);
}

TEST_F(GatewayTest, ParseReturnsTheStructuredResult) {
  load();
  const HttpResponse r = post("/model/parse", {{"text", "hello"}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(r.content_type, "application/json");
  const json body = json::parse(r.body);
  EXPECT_EQ(body["intent"], "greet");
  EXPECT_TRUE(body["confidence"].is_number());
  EXPECT_TRUE(body["intent_ranking"].is_array());
  EXPECT_TRUE(body["entities"].is_array());
  EXPECT_EQ(body["language"]["tag"], "latin_transliteration");
  EXPECT_EQ(body["text"], "hello");
}

TEST_F(GatewayTest, ParseIsIdempotentAndStateless) {
  load();
  const json request = {{"text", "python er dam koto"}, {"session_id", "s1"}};
  const HttpResponse a = post("/model/parse", request);
  const HttpResponse b = post("/model/parse", request);
  EXPECT_EQ(a.body, b.body);
  EXPECT_TRUE(gateway->session_ids().empty());
}

TEST_F(GatewayTest, BadRequests) {
  load();
  EXPECT_EQ(post("/model/parse", {{"text", ""}}).status, 400);
  EXPECT_EQ(post("/model/parse", {{"txt", "x"}}).status, 400);
  EXPECT_EQ(gateway->handle("POST", "/model/parse", "{oops").status, 400);
  EXPECT_EQ(gateway->handle("POST", "/webhooks/rest", "[1,2]").status, 400);
  EXPECT_EQ(post("/webhooks/rest", {{"sender", "a"}}).status, 400);
  EXPECT_EQ(gateway->handle("GET", "/model/parse", "").status, 405);
  EXPECT_EQ(gateway->handle("GET", "/nowhere", "").status, 404);
  EXPECT_EQ(gateway->handle("GET", "/sessions/ghost/tracker", "").status, 404);
}

TEST_F(GatewayTest, WebhookCreatesASessionAndAnswers) {
  load();
  const HttpResponse r = post("/webhooks/rest", {{"sender", "alice"}, {"message", "hello"}});
  ASSERT_EQ(r.status, 200) << r.body;
  const json replies = json::parse(r.body);
  ASSERT_GE(replies.size(), 1u);
  EXPECT_EQ(replies[0]["recipient_id"], "alice");
  EXPECT_EQ(gateway->session_ids(), (std::vector<std::string>{"alice"}));

  const json tracker = json::parse(gateway->handle("GET", "/sessions/alice/tracker", "").body);
  EXPECT_EQ(tracker["session_id"], "alice");
  EXPECT_EQ(tracker["events"][0]["kind"], "session_started");
  EXPECT_EQ(tracker["events"][1]["kind"], "user");
}

TEST_F(GatewayTest, GibberishGetsTheDefaultFallback) {
  GatewayConfig config;
  config.feedback_log.clear();
  gateway = std::make_unique<Gateway>(config);
  PipelineConfig strict = testing::fast_config(3);
  strict.fallback->threshold = 0.99;
  gateway->set_models(
      std::make_shared<NluPipeline>(NluPipeline::fit(strict, testing::tiny_project().nlu, 1)),
      std::make_shared<DialogueAgent>(testing::tiny_agent()));
  const json replies =
      json::parse(post("/webhooks/rest", {{"sender", "x"}, {"message", "qwzx vvvk"}}).body);
  ASSERT_EQ(replies.size(), 1u);
  EXPECT_EQ(replies[0]["text"], kDefaultFallbackText);
}

TEST_F(GatewayTest, FeedbackIsValidatedAndPersisted) {
  load();
  post("/webhooks/rest", {{"sender", "bob"}, {"message", "hello"}});
  const json tracker = json::parse(gateway->handle("GET", "/sessions/bob/tracker", "").body);
  const std::size_t messages = tracker["message_events"].size();
  ASSERT_GE(messages, 2u);

  EXPECT_EQ(post("/sessions/bob/feedback", {{"message_index", 1}, {"verdict", "correct"}}).status,
            204);
  EXPECT_EQ(post("/sessions/bob/feedback", {{"message_index", 0}, {"verdict", "wrong"}}).status,
            204);
  EXPECT_EQ(post("/sessions/bob/feedback", {{"message_index", messages}, {"verdict", "wrong"}}).status,
            400);
  EXPECT_EQ(post("/sessions/bob/feedback", {{"message_index", 0}, {"verdict", "meh"}}).status, 400);
  EXPECT_EQ(post("/sessions/bob/feedback", {{"message_index", -1}, {"verdict", "wrong"}}).status,
            400);
  EXPECT_EQ(post("/sessions/nobody/feedback", {{"message_index", 0}, {"verdict", "wrong"}}).status,
            404);

  ASSERT_EQ(gateway->feedback().size(), 2u);
  EXPECT_EQ(gateway->feedback()[0].verdict, "correct");
  const std::string log = read_file(dir.file("feedback.jsonl"));
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 2);
  const json first = json::parse(log.substr(0, log.find('\n')));
  EXPECT_EQ(first["session_id"], "bob");
  EXPECT_EQ(first["message_index"], 1);
  EXPECT_EQ(first["verdict"], "correct");
}

TEST_F(GatewayTest, LoadModelsFromDirectory) {
  testing::tiny_pipeline().save(dir.file(std::string(kNluModelFile)));
  testing::tiny_agent().save(dir.file(std::string(kCoreModelFile)));
  GatewayConfig config;
  config.model_dir = dir.path().string();
  Gateway g(config);
  g.load_models();
  EXPECT_TRUE(g.model_loaded());
  EXPECT_EQ(json::parse(g.handle("GET", "/status", "").body)["pipeline"], "fast");

  GatewayConfig missing;
  missing.model_dir = dir.file("absent");
  Gateway h(missing);
  EXPECT_THROW(h.load_models(), Error);
  EXPECT_FALSE(h.model_loaded());
}

TEST_F(GatewayTest, InterleavedSendersNeverShareEvents) {
  load();
  const std::vector<std::string> messages = {"hello", "python er dam koto", "bye", "হ্যালো",
                                             "বিদায়"};
  constexpr int kSenders = 6;
  constexpr int kTurns = 8;
  std::vector<std::vector<std::string>> sent(kSenders);
  std::vector<std::thread> threads;
  for (int s = 0; s < kSenders; ++s) {
    threads.emplace_back([&, s] {
      Rng rng(900 + static_cast<std::uint64_t>(s));
      const std::string id = "sender" + std::to_string(s);
      for (int t = 0; t < kTurns; ++t) {
        const std::string text = messages[rng.below(messages.size())];
        sent[static_cast<std::size_t>(s)].push_back(text);
        const HttpResponse r = post("/webhooks/rest", {{"sender", id}, {"message", text}});
        EXPECT_EQ(r.status, 200) << r.body;
        for (const json& reply : json::parse(r.body)) EXPECT_EQ(reply["recipient_id"], id);
        std::this_thread::yield();
      }
    });
  }
  for (auto& t : threads) t.join();

  ASSERT_EQ(gateway->session_ids().size(), static_cast<std::size_t>(kSenders));
  for (int s = 0; s < kSenders; ++s) {
    const std::string id = "sender" + std::to_string(s);
    const json tracker = json::parse(gateway->handle("GET", "/sessions/" + id + "/tracker", "").body);
    std::vector<std::string> seen;
    for (const json& e : tracker["events"]) {
      if (e["kind"] == "user") seen.push_back(e["text"]);
    }
    EXPECT_EQ(seen, sent[static_cast<std::size_t>(s)]) << id;
  }
}

}  // namespace
}  // namespace bnlu
