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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "banglanlu/errors.hpp"
#include "banglanlu/featurize.hpp"
#include "banglanlu/rng.hpp"
#include "banglanlu/text.hpp"
#include "banglanlu/tokenize.hpp"

namespace bnlu {
namespace {

std::vector<Token> toks(std::initializer_list<const char*> words) {
  std::string joined;
  for (const char* w : words) joined += std::string(joined.empty() ? "" : " ") + w;
  return whitespace_tokenize(joined);
}

std::map<std::string, double> named(const SparseVector& v, const CountVectorVocab& vocab) {
  std::map<std::string, double> out;
  for (const auto& [gram, index] : vocab.index) {
    if (v.at(index) != 0.0) out[gram] = v.at(index);
  }
  return out;
}

void expect_well_formed(const SparseVector& v) {
  for (std::size_t i = 0; i < v.nnz(); ++i) {
    EXPECT_LT(v.indices[i], v.dim);
    EXPECT_NE(v.values[i], 0.0);
    if (i > 0) EXPECT_LT(v.indices[i - 1], v.indices[i]);
  }
}

SparseVector sum(const std::vector<SparseVector>& vs, std::size_t dim) {
  std::map<std::uint32_t, double> acc;
  for (const SparseVector& v : vs) {
    for (std::size_t i = 0; i < v.nnz(); ++i) acc[v.indices[i]] += v.values[i];
  }
  return SparseVector::from_map(dim, acc);
}

// Every window of the space-padded token, except windows made only of
// padding.
std::map<std::string, double> brute_force_char_wb(const std::u32string& token, std::size_t lo,
                                                  std::size_t hi) {
  const std::u32string padded = U" " + token + U" ";
  std::map<std::string, double> counts;
  for (std::size_t n = lo; n <= hi; ++n) {
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      const std::u32string window = padded.substr(i, n);
      if (window.find_first_not_of(U' ') == std::u32string::npos) continue;
      counts[text::encode(window)] += 1.0;
    }
  }
  return counts;
}

TEST(CountVocab, CharWbHandEnumeration) {
  const std::vector<std::vector<Token>> corpus = {toks({"ami"})};
  const CountVectorVocab vocab = fit_count_vocab(corpus, Analyzer::CharWb, 1, 2);
  std::vector<std::string> grams;
  for (const auto& [g, i] : vocab.index) grams.push_back(g);
  EXPECT_EQ(grams, (std::vector<std::string>{" ", " a", "a", "am", "i", "i ", "m", "mi"}));
  std::uint32_t expected = 0;
  for (const auto& [g, i] : vocab.index) EXPECT_EQ(i, expected++);
}

TEST(CountVocab, WordAnalyzerDeduplicates) {
  const std::vector<std::vector<Token>> corpus = {toks({"a"}), toks({"a"})};
  const CountVectorVocab vocab = fit_count_vocab(corpus, Analyzer::Word, 1, 1);
  EXPECT_EQ(vocab.size(), 1u);
  EXPECT_TRUE(vocab.index.contains("a"));
}

TEST(CountVocab, EmptyCorpusGivesZeroVectors) {
  const CountVectorVocab vocab = fit_count_vocab({}, Analyzer::CharWb, 1, 4);
  EXPECT_EQ(vocab.size(), 0u);
  const SparseBlock block = count_vector_featurize(toks({"ami", "tumi"}), vocab);
  for (const SparseVector& v : block.tokens) EXPECT_EQ(v.nnz(), 0u);
  EXPECT_EQ(block.sentence.nnz(), 0u);
}

TEST(CountFeaturize, HandCountedToken) {
  const std::vector<std::vector<Token>> corpus = {toks({"ami"})};
  const CountVectorVocab vocab = fit_count_vocab(corpus, Analyzer::CharWb, 1, 2);
  const SparseBlock block = count_vector_featurize(toks({"ami"}), vocab);
  const std::map<std::string, double> expected = {{" a", 1}, {"am", 1}, {"mi", 1}, {"i ", 1},
                                                  {"a", 1},  {"m", 1},  {"i", 1}};
  EXPECT_EQ(named(block.tokens[0], vocab), expected);
}

TEST(CountFeaturize, OutOfVocabularyTokenIsZero) {
  const std::vector<std::vector<Token>> corpus = {toks({"ami"})};
  const CountVectorVocab vocab = fit_count_vocab(corpus, Analyzer::CharWb, 1, 2);
  EXPECT_EQ(count_vector_featurize(toks({"xyz"}), vocab).tokens[0].nnz(), 0u);
}

TEST(CountFeaturize, RepeatedTokenDoublesSentence) {
  const std::vector<std::vector<Token>> corpus = {toks({"ami"})};
  const CountVectorVocab vocab = fit_count_vocab(corpus, Analyzer::CharWb, 1, 4);
  const SparseBlock block = count_vector_featurize(toks({"ami", "ami"}), vocab);
  const SparseVector& t = block.tokens[0];
  ASSERT_EQ(block.sentence.indices, t.indices);
  for (std::size_t i = 0; i < t.nnz(); ++i) EXPECT_EQ(block.sentence.values[i], 2 * t.values[i]);
}

TEST(CountFeaturize, TransformNeverGrowsVocabulary) {
  const std::vector<std::vector<Token>> corpus = {toks({"dam", "koto"})};
  const CountVectorVocab vocab = fit_count_vocab(corpus, Analyzer::CharWb, 1, 4);
  const std::size_t before = vocab.size();
  const SparseBlock block = count_vector_featurize(toks({"notun", "shobdo", "ঢাকা"}), vocab);
  EXPECT_EQ(vocab.size(), before);
  EXPECT_EQ(block.sentence.dim, before);
}

TEST(CharWbProperty, BruteForceOracleOnRandomStrings) {
  const std::u32string alphabet = U"abcxyzAB01আমিকখা্।?";
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    std::u32string s;
    const std::size_t len = 1 + rng.below(8);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
    const std::string token_text = text::encode(s);
    const std::vector<Token> tokens = {Token{token_text, 0, s.size()}};
    const std::vector<std::vector<Token>> corpus = {tokens};
    const CountVectorVocab vocab = fit_count_vocab(corpus, Analyzer::CharWb, 1, 4);

    // Matching is ASCII case-insensitive.
    const auto expected = brute_force_char_wb(text::decode(text::ascii_lower(token_text)), 1, 4);
    const SparseBlock block = count_vector_featurize(tokens, vocab);
    ASSERT_EQ(named(block.tokens[0], vocab), expected) << token_text;

    std::size_t windows = 0;
    for (std::size_t n = 1; n <= 4; ++n) windows += len + 3 >= n ? len + 3 - n : 0;
    // The two lone padding spaces are the only all-padding windows.
    EXPECT_EQ(token_ngrams(token_text, vocab).size(), windows - 2);
  }
}

TEST(Regex, NumberPatternMarksToken) {
  RegexPatternSet patterns;
  patterns.add("number", "[0-9]+");
  const std::string msg = "dam 500 taka";
  const SparseBlock block = regex_featurize(msg, whitespace_tokenize(msg), patterns);
  ASSERT_EQ(block.tokens.size(), 3u);
  EXPECT_EQ(block.tokens[0].nnz(), 0u);
  EXPECT_EQ(block.tokens[1].at(0), 1.0);
  EXPECT_EQ(block.tokens[2].nnz(), 0u);
  EXPECT_EQ(block.sentence.dim, 1u);
  EXPECT_EQ(block.sentence.at(0), 1.0);
}

TEST(Regex, NoPatternsGiveZeroDim) {
  const std::string msg = "dam 500";
  const SparseBlock block = regex_featurize(msg, whitespace_tokenize(msg), RegexPatternSet{});
  EXPECT_EQ(block.sentence.dim, 0u);
  for (const auto& v : block.tokens) EXPECT_EQ(v.dim, 0u);
}

TEST(Regex, TokenMatchedByTwoPatterns) {
  RegexPatternSet patterns;
  patterns.add("digits", "[0-9]+");
  patterns.add("price", "500");
  const std::string msg = "dam 500";
  const SparseBlock block = regex_featurize(msg, whitespace_tokenize(msg), patterns);
  EXPECT_EQ(block.tokens[1].nnz(), 2u);
}

TEST(Regex, InvalidOrDuplicatePatternsAreRejected) {
  RegexPatternSet patterns;
  patterns.add("a", "x+");
  EXPECT_THROW(patterns.add("a", "y"), Error);
  EXPECT_THROW(patterns.add("b", "(unclosed"), Error);
  try {
    patterns.add("c", "[");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPattern);
  }
}

TEST(Regex, PatternFileFormat) {
  const RegexPatternSet set = load_regex_patterns("# comment\n\nnumber\t[0-9]+\nphone\t01[0-9]{9}\n");
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.patterns()[1].name, "phone");
}

TEST(Regex, MatchesUseCodePointSpans) {
  RegexPatternSet patterns;
  patterns.add("currency", "টাকা");
  const std::string msg = "৫০০ টাকা দাম";
  const SparseBlock block = regex_featurize(msg, whitespace_tokenize(msg), patterns);
  EXPECT_EQ(block.tokens[0].nnz(), 0u);
  EXPECT_EQ(block.tokens[1].nnz(), 1u);
  EXPECT_EQ(block.tokens[2].nnz(), 0u);
}

TEST(LexSyn, SingleTokenHasBosAndEos) {
  const auto vs = lexical_syntactic_featurize(toks({"abc"}));
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].dim, kLexSynDim);
  EXPECT_EQ(vs[0].at(lexsyn::index(0, lexsyn::kBos)), 1.0);
  EXPECT_EQ(vs[0].at(lexsyn::index(0, lexsyn::kEos)), 1.0);
}

TEST(LexSyn, DigitWindow) {
  const auto vs = lexical_syntactic_featurize(toks({"500", "taka"}));
  EXPECT_EQ(vs[0].at(lexsyn::index(0, lexsyn::kDigit)), 1.0);
  EXPECT_EQ(vs[1].at(lexsyn::index(-1, lexsyn::kDigit)), 1.0);
  EXPECT_EQ(vs[1].at(lexsyn::index(0, lexsyn::kDigit)), 0.0);
}

TEST(LexSyn, BanglaScriptAndTitleCase) {
  EXPECT_EQ(lexical_syntactic_featurize(toks({"ঢাকা"}))[0].at(lexsyn::index(0, lexsyn::kBangla)),
            1.0);
  EXPECT_EQ(lexical_syntactic_featurize(toks({"Dhaka"}))[0].at(lexsyn::index(0, lexsyn::kTitle)),
            1.0);
  EXPECT_EQ(lexical_syntactic_featurize(toks({"dhaka"}))[0].at(lexsyn::index(0, lexsyn::kTitle)),
            0.0);
}

TEST(LexSyn, EveryTokenHasOnePrefixAndSuffixBucketAtCenter) {
  for (const SparseVector& v : lexical_syntactic_featurize(toks({"ami", "koto", "ঢাকা", "x"}))) {
    expect_well_formed(v);
    int prefixes = 0;
    int suffixes = 0;
    for (std::size_t b = 0; b < kLexSynBuckets; ++b) {
      prefixes += v.at(lexsyn::index(0, lexsyn::kPrefix + b)) != 0.0;
      suffixes += v.at(lexsyn::index(0, lexsyn::kSuffix + b)) != 0.0;
    }
    EXPECT_EQ(prefixes, 1);
    EXPECT_EQ(suffixes, 1);
  }
}

TEST(Pretrained, LoadsTable) {
  const PretrainedTable t = load_pretrained_vectors("2 3\na 1 2 3\nb 0 0 1");
  EXPECT_EQ(t.dim, 3u);
  EXPECT_EQ(t.vectors.size(), 2u);
  EXPECT_EQ(t.vectors.at("a"), (std::vector<double>{1, 2, 3}));
}

TEST(Pretrained, ErrorContracts) {
  auto code = [](const char* s) {
    try {
      load_pretrained_vectors(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code("2 3\na 1 2\nb 0 0 1"), ErrorCode::HeaderMismatch);
  EXPECT_EQ(code("1 3\na 1 2 3\nb 0 0 1"), ErrorCode::HeaderMismatch);
  EXPECT_EQ(code("1 2\na nan 1"), ErrorCode::NonFiniteValue);
  EXPECT_EQ(code("1 2\na inf 1"), ErrorCode::NonFiniteValue);
}

TEST(Dense, TableMeanAndOov) {
  PretrainedTable t;
  t.dim = 2;
  t.vectors["a"] = {1, 0};
  const DenseBlock same = dense_featurize(toks({"a", "a"}), DenseSource{t});
  EXPECT_EQ(same.sentence.values, (std::vector<double>{1, 0}));
  const DenseBlock oov = dense_featurize(toks({"zzz"}), DenseSource{t});
  EXPECT_EQ(oov.tokens[0].values, (std::vector<double>{0, 0}));
}

TEST(Dense, EmptyTokensGiveZeroSentence) {
  const DenseBlock block = dense_featurize({}, DenseSource{HashedNGram{16, 7}});
  EXPECT_EQ(block.sentence.values, std::vector<double>(16, 0.0));
}

TEST(Dense, HashedIsDeterministicAndUnitLength) {
  const DenseSource source = HashedNGram{128, 7};
  const DenseBlock a = dense_featurize(toks({"ami"}), source);
  const DenseBlock b = dense_featurize(toks({"ami"}), source);
  EXPECT_EQ(a.tokens[0], b.tokens[0]);
  double norm = 0;
  for (double x : a.tokens[0].values) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  const DenseBlock other = dense_featurize(toks({"ami"}), DenseSource{HashedNGram{128, 8}});
  EXPECT_NE(a.tokens[0], other.tokens[0]);
}

TEST(Assemble, ShiftsSecondSparseBlock) {
  auto block = [](std::size_t dim, std::uint32_t index) {
    SparseBlock b;
    b.tokens = {SparseVector::from_map(dim, {{index, 1.0}})};
    b.sentence = b.tokens[0];
    return FeaturizerOutput{b};
  };
  const std::vector<FeaturizerOutput> outputs = {block(3, 1), block(5, 2)};
  const MessageFeatures f = assemble_features(toks({"x"}), outputs);
  EXPECT_EQ(f.sparse_dim(), 8u);
  EXPECT_EQ(f.token_sparse[0].indices, (std::vector<std::uint32_t>{1, 5}));
  EXPECT_EQ(f.dense_dim(), 0u);
}

TEST(Assemble, DenseOnlyHasZeroSparseDim) {
  const std::vector<FeaturizerOutput> outputs = {
      dense_featurize(toks({"a", "b"}), DenseSource{HashedNGram{8, 1}})};
  const MessageFeatures f = assemble_features(toks({"a", "b"}), outputs);
  EXPECT_EQ(f.sparse_dim(), 0u);
  EXPECT_EQ(f.dense_dim(), 8u);
  EXPECT_EQ(f.token_sparse.size(), 2u);
}

TEST(Assemble, TokenCountMismatch) {
  const std::vector<FeaturizerOutput> outputs = {
      dense_featurize(toks({"a"}), DenseSource{HashedNGram{8, 1}})};
  try {
    assemble_features(toks({"a", "b"}), outputs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TokenCountMismatch);
  }
}

TEST(FeaturizeProperty, SentenceIsSumOfTokensForCountAndRegex) {
  const std::u32string alphabet = U"ab1 ৫টাকা";
  RegexPatternSet patterns;
  patterns.add("digit", "[0-9]|৫");
  patterns.add("taka", "টাকা|ab");
  Rng rng(8);
  std::vector<std::vector<Token>> corpus;
  std::vector<std::string> messages;
  for (int i = 0; i < 200; ++i) {
    std::u32string s;
    const std::size_t len = rng.below(16);
    for (std::size_t j = 0; j < len; ++j) s += alphabet[rng.below(alphabet.size())];
    messages.push_back(text::encode(s));
    corpus.push_back(whitespace_tokenize(messages.back()));
  }
  const CountVectorVocab vocab =
      fit_count_vocab(std::span(corpus).subspan(0, 100), Analyzer::CharWb, 1, 4);
  for (std::size_t i = 0; i < messages.size(); ++i) {
    const SparseBlock counts = count_vector_featurize(corpus[i], vocab);
    for (const auto& v : counts.tokens) expect_well_formed(v);
    EXPECT_EQ(counts.sentence, sum(counts.tokens, vocab.size()));
    const SparseBlock regex = regex_featurize(messages[i], corpus[i], patterns);
    // Every pattern match lies inside some token here, so the sentence flag
    // is the clipped token sum.
    SparseVector clipped = sum(regex.tokens, patterns.size());
    for (double& v : clipped.values) v = std::min(v, 1.0);
    EXPECT_EQ(regex.sentence, clipped) << messages[i];
  }
}

}  // namespace
}  // namespace bnlu
