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

#include <array>
#include <set>
#include <sstream>

#include "banglanlu/corpus.hpp"
#include "banglanlu/errors.hpp"
#include "banglanlu/rng.hpp"
#include "yaml_lite.hpp"

namespace bnlu {

namespace {

enum Script { kBangla = 0, kLatin = 1 };

struct IntentSpec {
  std::string name;
  std::string readable;
  // keywords[script] holds two words owned by this intent only.
  std::array<std::array<std::string, 2>, 2> keywords;
};

struct EntitySpec {
  std::string name;
  std::array<std::vector<std::string>, 2> values;
};

const std::vector<IntentSpec>& known_intents() {
  static const std::vector<IntentSpec> intents = {
      {"greet", "greetings", {{{"হ্যালো", "আসসালামুআলাইকুম"}, {"hello", "salam"}}}},
      {"goodbye", "goodbye", {{{"বিদায়", "আল্লাহহাফেজ"}, {"bye", "biday"}}}},
      {"ask_price", "course fees", {{{"দাম", "খরচ"}, {"dam", "khoroch"}}}},
      {"course_details", "course details", {{{"কোর্স", "বিস্তারিত"}, {"course", "bistarito"}}}},
      {"course_access_duration", "access duration",
       {{{"মেয়াদ", "এক্সেস"}, {"meyad", "access"}}}},
      {"payment_method", "payment methods", {{{"পেমেন্ট", "বিকাশ"}, {"payment", "bkash"}}}},
      {"refund_policy", "refunds", {{{"রিফান্ড", "ফেরত"}, {"refund", "ferot"}}}},
      {"contact_info", "contact details", {{{"যোগাযোগ", "ফোন"}, {"contact", "phone"}}}},
      {"class_schedule", "class schedule", {{{"ক্লাস", "রুটিন"}, {"class", "routine"}}}},
      {"certificate_info", "certificates", {{{"সার্টিফিকেট", "সনদ"}, {"certificate", "sonod"}}}},
      {"discount_offer", "discounts", {{{"ছাড়", "অফার"}, {"discount", "offer"}}}},
      {"thank_you", "thanks", {{{"ধন্যবাদ", "শুকরিয়া"}, {"dhonnobad", "thanks"}}}},
  };
  return intents;
}

const std::vector<EntitySpec>& known_entities() {
  static const std::vector<EntitySpec> entities = {
      {"city", {{{"ঢাকা", "চট্টগ্রাম", "সিলেট", "খুলনা"}, {"dhaka", "chittagong", "sylhet", "khulna"}}}},
      {"course", {{{"পাইথন", "ওয়েব ডিজাইন", "ডাটা সায়েন্স"}, {"python", "web design", "data science"}}}},
      {"price", {{{"৫০০", "১২০০", "৩০০০"}, {"500", "1200", "3000"}}}},
  };
  return entities;
}

const std::array<std::vector<std::string>, 2>& fillers() {
  static const std::array<std::vector<std::string>, 2> words = {{
      {"আমি", "জানতে", "চাই", "আপনাদের", "একটু", "বলবেন", "কি", "প্লিজ"},
      {"ami", "jante", "chai", "apnader", "ektu", "bolben", "ki", "plz"},
  }};
  return words;
}

// Pseudo-words for intents and entity types beyond the hand-written lists.
std::string pseudo_word(Rng& rng, Script script, std::set<std::string>& used) {
  static const std::array<std::vector<std::string>, 2> syllables = {{
      {"কা", "তি", "মো", "রু", "সে", "লা", "নি", "বো", "গু", "পা", "দে", "হি"},
      {"ka", "ti", "mo", "ru", "se", "la", "ni", "bo", "gu", "pa", "de", "hi"},
  }};
  const auto& pool = syllables[script];
  for (;;) {
    std::string word;
    const std::size_t n = 3 + rng.below(2);
    for (std::size_t i = 0; i < n; ++i) word += pool[rng.below(pool.size())];
    if (used.insert(word).second) return word;
  }
}

std::string response_text(const IntentSpec& intent, Script script) {
  if (intent.name == "greet") {
    return script == kBangla ? "হ্যালো! আমি আপনাকে কীভাবে সাহায্য করতে পারি?"
                             : "Hello! How can I help you?";
  }
  if (intent.name == "goodbye") {
    return script == kBangla ? "আবার দেখা হবে, ভালো থাকবেন।" : "Goodbye, take care!";
  }
  return script == kBangla ? intent.readable + " সম্পর্কে তথ্য দেওয়া হলো।"
                           : "Here is the information about " + intent.readable + ".";
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(std::uint64_t seed, std::size_t n_intents,
                                          std::size_t examples_per_intent,
                                          std::size_t n_entity_types) {
  if (n_intents < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 intents");
  if (examples_per_intent < 4) {
    throw Error(ErrorCode::InvalidArgument, "need at least 4 examples per intent");
  }
  Rng rng(seed);

  std::set<std::string> used;
  for (const auto& spec : known_intents()) {
    for (const auto& kws : spec.keywords) used.insert(kws.begin(), kws.end());
  }
  for (const auto& spec : known_entities()) {
    for (const auto& vals : spec.values) used.insert(vals.begin(), vals.end());
  }
  for (const auto& words : fillers()) used.insert(words.begin(), words.end());

  std::vector<IntentSpec> intents;
  for (std::size_t i = 0; i < n_intents; ++i) {
    if (i < known_intents().size()) {
      intents.push_back(known_intents()[i]);
      continue;
    }
    IntentSpec spec;
    spec.name = "intent_" + std::to_string(i + 1);
    spec.readable = "topic " + std::to_string(i + 1);
    for (int s : {kBangla, kLatin}) {
      for (auto& kw : spec.keywords[s]) kw = pseudo_word(rng, static_cast<Script>(s), used);
    }
    intents.push_back(std::move(spec));
  }

  std::vector<EntitySpec> entities;
  for (std::size_t e = 0; e < n_entity_types; ++e) {
    if (e < known_entities().size()) {
      entities.push_back(known_entities()[e]);
      continue;
    }
    EntitySpec spec;
    spec.name = "entity_" + std::to_string(e + 1);
    for (int s : {kBangla, kLatin}) {
      for (int v = 0; v < 3; ++v) {
        spec.values[s].push_back(pseudo_word(rng, static_cast<Script>(s), used));
      }
    }
    entities.push_back(std::move(spec));
  }

  SyntheticCorpus corpus;

  std::ostringstream nlu;
  nlu << "nlu:\n";
  for (std::size_t i = 0; i < intents.size(); ++i) {
    const IntentSpec& intent = intents[i];
    const EntitySpec* entity = nullptr;
    if (i >= 2 && !entities.empty()) entity = &entities[i % entities.size()];

    nlu << "  - intent: " << intent.name << "\n    examples:\n";
    std::set<std::string> seen;
    for (std::size_t j = 0; j < examples_per_intent; ++j) {
      const auto script = static_cast<Script>(j % 2);
      std::string line;
      for (int attempt = 0; attempt < 20; ++attempt) {
        std::vector<std::string> words;
        const auto& fill = fillers()[script];
        const std::size_t n_fill = rng.below(3);
        for (std::size_t f = 0; f < n_fill; ++f) words.push_back(fill[rng.below(fill.size())]);
        const auto& kws = intent.keywords[script];
        const std::size_t first = (j / 2) % 2;
        words.push_back(kws[first]);
        if (rng.below(3) == 0) words.push_back(kws[1 - first]);
        if (entity != nullptr && j % 3 == 1) {
          const auto& vals = entity->values[script];
          const std::string markup =
              "[" + vals[rng.below(vals.size())] + "](" + entity->name + ")";
          const std::size_t at = rng.below(words.size() + 1);
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), markup);
        }
        line.clear();
        for (std::size_t w = 0; w < words.size(); ++w) {
          if (w) line += ' ';
          line += words[w];
        }
        if (j % 4 == 3) line += script == kBangla ? "।" : "?";
        if (seen.insert(line).second) break;
      }
      nlu << "      - " << yaml_lite::quote_if_needed(line) << "\n";
    }
  }
  for (const EntitySpec& entity : entities) {
    nlu << "  - synonym: " << yaml_lite::quote_if_needed(entity.values[kLatin][0])
        << "\n    examples:\n"
        << "      - " << yaml_lite::quote_if_needed(entity.values[kBangla][0]) << "\n";
  }
  corpus.nlu = nlu.str();

  std::ostringstream domain;
  domain << "intents:\n";
  for (const auto& intent : intents) domain << "  - " << intent.name << "\n";
  domain << "entities:\n";
  for (const auto& entity : entities) domain << "  - " << entity.name << "\n";
  domain << "responses:\n";
  for (const auto& intent : intents) {
    domain << "  utter_" << intent.name << ":\n";
    for (Script s : {kBangla, kLatin}) {
      domain << "    - text: " << yaml_lite::quote_if_needed(response_text(intent, s)) << "\n";
    }
  }
  corpus.domain = domain.str();

  std::ostringstream stories;
  stories << "stories:\n";
  for (const auto& intent : intents) {
    stories << "  - story: " << intent.name << " path\n"
            << "    steps:\n"
            << "      - intent: " << intent.name << "\n"
            << "      - action: utter_" << intent.name << "\n";
  }
  std::vector<std::string> tour = {"greet"};
  if (intents.size() > 2) tour.push_back(intents[2].name);
  tour.push_back("goodbye");
  stories << "  - story: multi turn conversation\n    steps:\n";
  for (const auto& name : tour) {
    stories << "      - intent: " << name << "\n"
            << "      - action: utter_" << name << "\n";
  }
  stories << "rules:\n"
          << "  - rule: say goodbye\n"
          << "    steps:\n"
          << "      - intent: goodbye\n"
          << "      - action: utter_goodbye\n";
  corpus.stories = stories.str();
  return corpus;
}

}  // namespace bnlu
