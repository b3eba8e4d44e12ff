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
#include <map>
#include <string>
#include <vector>

#include "banglanlu/corpus.hpp"
#include "banglanlu/errors.hpp"
#include "banglanlu/rng.hpp"
#include "banglanlu/text.hpp"
#include "test_support.hpp"

namespace bnlu {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::IoError;
}

void expect_spans_consistent(const std::string& text, const std::vector<EntitySpan>& spans) {
  const std::size_t n = text::length(text);
  std::size_t previous_end = 0;
  for (const EntitySpan& span : spans) {
    EXPECT_LT(span.start, span.end);
    EXPECT_LE(span.end, n);
    EXPECT_GE(span.start, previous_end);
    EXPECT_EQ(span.value, text::slice(text, span.start, span.end));
    previous_end = span.end;
  }
}

TEST(EntityMarkup, SingleBanglaSpanUsesCodePointOffsets) {
  const MarkupParse p = parse_entity_markup("[ঢাকা](city) e kobe");
  EXPECT_EQ(p.text, "ঢাকা e kobe");
  ASSERT_EQ(p.spans.size(), 1u);
  EXPECT_EQ(p.spans[0], (EntitySpan{0, 4, "city", "ঢাকা"}));
}

TEST(EntityMarkup, PlainTextIsUnchanged) {
  const MarkupParse p = parse_entity_markup("hello there");
  EXPECT_EQ(p.text, "hello there");
  EXPECT_TRUE(p.spans.empty());
}

TEST(EntityMarkup, TwoSpansInOrder) {
  const MarkupParse p = parse_entity_markup("a [b](x) c [d](y)");
  EXPECT_EQ(p.text, "a b c d");
  ASSERT_EQ(p.spans.size(), 2u);
  EXPECT_EQ(p.spans[0], (EntitySpan{2, 3, "x", "b"}));
  EXPECT_EQ(p.spans[1], (EntitySpan{6, 7, "y", "d"}));
}

TEST(EntityMarkup, MalformedMarkupIsRejected) {
  EXPECT_EQ(code_of([] { parse_entity_markup("a [b c"); }), ErrorCode::UnbalancedMarkup);
  EXPECT_EQ(code_of([] { parse_entity_markup("a [b] c"); }), ErrorCode::UnbalancedMarkup);
  EXPECT_EQ(code_of([] { parse_entity_markup("a [b](x c"); }), ErrorCode::UnbalancedMarkup);
  EXPECT_EQ(code_of([] { parse_entity_markup("a [b]() c"); }), ErrorCode::EmptyEntityName);
  EXPECT_EQ(code_of([] { parse_entity_markup("a [](x) c"); }), ErrorCode::EmptyEntitySurface);
}

TEST(EntityMarkup, RenderInvertsParse) {
  for (const char* raw : {"a [b](x) c [d](y)", "[ঢাকা](city) e kobe", "no markup"}) {
    const MarkupParse p = parse_entity_markup(raw);
    EXPECT_EQ(render_entity_markup({p.text, "i", p.spans}), raw);
  }
}

TEST(EntityMarkupProperty, BracketFreeTextIsIdentity) {
  const std::u32string alphabet = U"abc xyz()?.,আমিকখ।0১";
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string s;
    const std::size_t len = rng.below(20);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
    const std::string raw = text::encode(s);
    const MarkupParse p = parse_entity_markup(raw);
    EXPECT_EQ(p.text, raw);
    EXPECT_TRUE(p.spans.empty());
  }
}

TEST(EntityMarkupProperty, RandomAnnotationsKeepValueEqualToText) {
  const std::vector<std::u32string> words = {U"dam", U"koto", U"ঢাকা", U"পাইথন", U"৫০০", U"ki"};
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::string raw;
    const std::size_t n = 1 + rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) raw += ' ';
      const std::string w = text::encode(words[rng.below(words.size())]);
      raw += rng.below(3) == 0 ? "[" + w + "](e" + std::to_string(rng.below(3)) + ")" : w;
    }
    const MarkupParse p = parse_entity_markup(raw);
    expect_spans_consistent(p.text, p.spans);
  }
}

TEST(NluFile, CountsIntentsExamplesAndSynonyms) {
  const TrainingSet ts = parse_nlu_file(R"(nlu:
  - intent: b
    examples:
      - one [dhaka](city)
      - two
  - intent: a
    examples: |
      - three
      - four
  - synonym: dhk
    examples:
      - dhaka
)");
  EXPECT_EQ(ts.examples.size(), 4u);
  EXPECT_EQ(ts.intents, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(ts.entity_types, (std::vector<std::string>{"city"}));
  EXPECT_EQ(ts.synonyms.at("dhaka"), "dhk");
  for (const TrainingExample& ex : ts.examples) expect_spans_consistent(ex.text, ex.entities);
}

TEST(NluFile, ErrorContracts) {
  EXPECT_EQ(code_of([] { parse_nlu_file("nlu:\n  - intent: a\n    examples:\n"); }),
            ErrorCode::IntentWithNoExamples);
  EXPECT_EQ(code_of([] {
              parse_nlu_file(
                  "nlu:\n  - intent: a\n    examples:\n      - x\n"
                  "  - intent: a\n    examples:\n      - y\n");
            }),
            ErrorCode::DuplicateIntentBlock);
  EXPECT_EQ(code_of([] { parse_nlu_file("intents:\n  - a\n"); }), ErrorCode::SyntaxError);
}

TEST(NluFile, SyntaxErrorsCarryLineNumbers) {
  try {
    parse_nlu_file("nlu:\n  - intent: a\n    examples:\n      - x\n    bogus: 1\n");
    FAIL() << "expected a syntax error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(NluFileProperty, SerializeThenParseIsStable) {
  const SyntheticCorpus corpus = generate_synthetic_corpus(42, 12, 10, 3);
  const TrainingSet first = parse_nlu_file(corpus.nlu);
  const TrainingSet second = parse_nlu_file(serialize_nlu(first));
  EXPECT_EQ(first, second);
  const TrainingSet tiny = parse_nlu_file(testing::kNlu);
  EXPECT_EQ(parse_nlu_file(serialize_nlu(tiny)), tiny);
}

TEST(DomainFile, ResponsesBecomeActions) {
  const Domain d = parse_domain_file("responses:\n  utter_greet:\n    - text: hi\n");
  EXPECT_EQ(d.actions, (std::vector<std::string>{"utter_greet"}));
  EXPECT_TRUE(d.has_action("utter_greet"));
  EXPECT_EQ(d.responses.at("utter_greet"), (std::vector<std::string>{"hi"}));
}

TEST(DomainFile, ActionsListMergesCustomActionsOnce) {
  const Domain d = parse_domain_file(
      "responses:\n  utter_b:\n    - text: b\n  utter_a:\n    - text: a\n"
      "actions:\n  - utter_a\n  - action_echo\n");
  EXPECT_EQ(d.actions, (std::vector<std::string>{"action_echo", "utter_a", "utter_b"}));
}

TEST(DomainFile, ResponseNamesMustStartWithUtter) {
  EXPECT_EQ(code_of([] { parse_domain_file("responses:\n  greet:\n    - text: hi\n"); }),
            ErrorCode::InvalidResponseName);
}

TEST(DomainFileProperty, SerializeThenParseIsStable) {
  const Domain d = parse_domain_file(testing::kDomain);
  const Domain again = parse_domain_file(serialize_domain(d));
  EXPECT_EQ(again.responses, d.responses);
  EXPECT_EQ(again.actions, d.actions);
  EXPECT_EQ(again.intents, d.intents);
  EXPECT_EQ(again.entity_types, d.entity_types);
}

class StoriesFile : public ::testing::Test {
 protected:
  TrainingSet ts = parse_nlu_file("nlu:\n  - intent: greet\n    examples:\n      - hi\n");
  Domain domain = parse_domain_file("responses:\n  utter_greet:\n    - text: hi\n");
};

TEST_F(StoriesFile, TwoStepStory) {
  const StorySet s = parse_stories_file(
      "stories:\n  - story: s\n    steps:\n      - intent: greet\n      - action: utter_greet\n",
      domain, ts);
  ASSERT_EQ(s.stories.size(), 1u);
  EXPECT_EQ(s.stories[0].name, "s");
  EXPECT_EQ(s.stories[0].steps.size(), 2u);
  EXPECT_TRUE(s.stories[0].steps[0].is_user());
  EXPECT_FALSE(s.stories[0].steps[1].is_user());
}

TEST_F(StoriesFile, CrossReferenceErrors) {
  EXPECT_EQ(code_of([&] {
              parse_stories_file(
                  "stories:\n  - story: s\n    steps:\n      - intent: greet\n"
                  "      - action: utter_x\n",
                  domain, ts);
            }),
            ErrorCode::UnknownActionInStory);
  EXPECT_EQ(code_of([&] {
              parse_stories_file(
                  "stories:\n  - story: s\n    steps:\n      - intent: nope\n"
                  "      - action: utter_greet\n",
                  domain, ts);
            }),
            ErrorCode::UnknownIntentInStory);
  EXPECT_EQ(code_of([&] {
              parse_stories_file(
                  "stories:\n  - story: s\n    steps:\n      - intent: greet\n"
                  "  - story: s\n    steps:\n      - intent: greet\n",
                  domain, ts);
            }),
            ErrorCode::DuplicateStoryName);
}

TEST_F(StoriesFile, FirstStepMustBeAUserTurn) {
  EXPECT_EQ(code_of([&] {
              parse_stories_file("stories:\n  - story: s\n    steps:\n      - action: utter_greet\n",
                                 domain, ts);
            }),
            ErrorCode::SyntaxError);
}

TEST_F(StoriesFile, SerializeThenParseIsStable) {
  const Project p = testing::tiny_project();
  const StorySet again = parse_stories_file(serialize_stories(p.stories), p.domain, p.nlu);
  ASSERT_EQ(again.stories.size(), p.stories.stories.size());
  ASSERT_EQ(again.rules.size(), p.stories.rules.size());
  for (std::size_t i = 0; i < again.stories.size(); ++i) {
    EXPECT_EQ(again.stories[i].name, p.stories.stories[i].name);
    EXPECT_EQ(again.stories[i].steps, p.stories.stories[i].steps);
  }
}

TrainingSet counted_set(const std::vector<std::size_t>& sizes) {
  TrainingSet ts;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::string intent = "intent_" + std::to_string(i);
    ts.intents.push_back(intent);
    for (std::size_t j = 0; j < sizes[i]; ++j) {
      ts.examples.push_back({intent + " example " + std::to_string(j), intent, {}});
    }
  }
  std::sort(ts.intents.begin(), ts.intents.end());
  return ts;
}

std::map<std::string, std::size_t> per_intent(const TrainingSet& ts) {
  std::map<std::string, std::size_t> counts;
  for (const TrainingExample& ex : ts.examples) ++counts[ex.intent];
  return counts;
}

TEST(Split, FiveExamplesGiveOneTest) {
  const TrainTestSplit s = split_train_test(counted_set({5}), 0.2, 1);
  EXPECT_EQ(s.test.examples.size(), 1u);
  EXPECT_EQ(s.train.examples.size(), 4u);
}

TEST(Split, SameSeedSameSplit) {
  const TrainingSet ts = counted_set({7, 9, 4});
  const TrainTestSplit a = split_train_test(ts, 0.2, 9);
  const TrainTestSplit b = split_train_test(ts, 0.2, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(split_fingerprint(a), split_fingerprint(b));
}

TEST(Split, SingletonIntentIsRejected) {
  EXPECT_EQ(code_of([] { split_train_test(counted_set({4, 1}), 0.2, 0); }),
            ErrorCode::IntentTooSmall);
}

TEST(Split, FractionOutsideOpenIntervalIsRejected) {
  EXPECT_EQ(code_of([] { split_train_test(counted_set({4}), 0.0, 0); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { split_train_test(counted_set({4}), 1.0, 0); }),
            ErrorCode::InvalidArgument);
}

TEST(Split, PaperShapedCorpusTestSize) {
  std::vector<std::size_t> sizes;
  Rng rng(3);
  for (int i = 0; i < 45; ++i) sizes.push_back(4 + rng.below(20));
  const TrainTestSplit s = split_train_test(counted_set(sizes), 0.2, 42);
  std::size_t expected = 0;
  for (std::size_t n : sizes) expected += std::max<std::size_t>(1, n / 5);
  EXPECT_EQ(s.test.examples.size(), expected);
}

TEST(SplitProperty, PartitionIsStratifiedAndComplete) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> sizes;
    const std::size_t k = 1 + rng.below(8);
    for (std::size_t i = 0; i < k; ++i) sizes.push_back(2 + rng.below(15));
    const double fraction = 0.05 + 0.9 * rng.unit();
    const TrainingSet ts = counted_set(sizes);
    const TrainTestSplit s = split_train_test(ts, fraction, rng.next());

    std::vector<std::string> all;
    for (const auto& ex : s.train.examples) all.push_back(ex.text);
    for (const auto& ex : s.test.examples) all.push_back(ex.text);
    std::vector<std::string> input;
    for (const auto& ex : ts.examples) input.push_back(ex.text);
    std::sort(all.begin(), all.end());
    std::sort(input.begin(), input.end());
    EXPECT_EQ(all, input);

    const auto test_counts = per_intent(s.test);
    const auto input_counts = per_intent(ts);
    for (const auto& [intent, n] : input_counts) {
      const auto expected = std::max<std::size_t>(
          1, static_cast<std::size_t>(static_cast<double>(n) * fraction));
      EXPECT_EQ(test_counts.at(intent), expected) << intent << " n=" << n << " f=" << fraction;
    }
  }
}

TEST(SyntheticCorpus, CountingContract) {
  const SyntheticCorpus c = generate_synthetic_corpus(42, 12, 10, 3);
  const Project p = load_project(c.nlu, c.domain, c.stories);
  EXPECT_EQ(p.nlu.examples.size(), 120u);
  EXPECT_EQ(p.nlu.intents.size(), 12u);
  EXPECT_EQ(p.nlu.entity_types.size(), 3u);
  EXPECT_EQ(p.domain.responses.size(), 12u);
  EXPECT_EQ(p.stories.stories.size(), 13u);
  for (const TrainingExample& ex : p.nlu.examples) expect_spans_consistent(ex.text, ex.entities);
}

TEST(SyntheticCorpus, SameSeedIsByteIdentical) {
  const SyntheticCorpus a = generate_synthetic_corpus(42, 12, 10, 3);
  const SyntheticCorpus b = generate_synthetic_corpus(42, 12, 10, 3);
  EXPECT_EQ(a.nlu, b.nlu);
  EXPECT_EQ(a.domain, b.domain);
  EXPECT_EQ(a.stories, b.stories);
  EXPECT_NE(generate_synthetic_corpus(43, 12, 10, 3).nlu, a.nlu);
}

TEST(SyntheticCorpus, OtherShapesParse) {
  for (auto [intents, examples, entities] :
       {std::tuple{2, 4, 0}, std::tuple{5, 6, 1}, std::tuple{20, 12, 3}}) {
    const SyntheticCorpus c = generate_synthetic_corpus(1, intents, examples, entities);
    const Project p = load_project(c.nlu, c.domain, c.stories);
    EXPECT_EQ(p.nlu.examples.size(), static_cast<std::size_t>(intents * examples));
    EXPECT_EQ(p.stories.stories.size(), static_cast<std::size_t>(intents + 1));
  }
}

TEST(ProjectDir, ReadsTheThreeFiles) {
  testing::TempDir dir("project");
  write_file(dir.file("nlu.yml"), testing::kNlu);
  write_file(dir.file("domain.yml"), testing::kDomain);
  write_file(dir.file("stories.yml"), testing::kStories);
  const Project p = load_project_dir(dir.path().string());
  EXPECT_EQ(p.nlu.intents.size(), 3u);
  EXPECT_EQ(code_of([&] { load_project_dir(dir.file("missing")); }), ErrorCode::IoError);
}

}  // namespace
}  // namespace bnlu
