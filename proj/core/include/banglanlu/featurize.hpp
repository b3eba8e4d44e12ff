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

// Sparse and dense featurizers and their assembly into per-token and
// per-sentence feature blocks.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "banglanlu/tokenize.hpp"

namespace bnlu {

/// Sorted-index sparse vector; indices strictly increase, no stored zeros.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  static SparseVector zeros(std::size_t dim) { return SparseVector{dim, {}, {}}; }
  /// Builds from an index -> value map, dropping zeros.
  static SparseVector from_map(std::size_t dim, const std::map<std::uint32_t, double>& entries);

  std::size_t nnz() const { return indices.size(); }
  double at(std::uint32_t index) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct DenseVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  friend bool operator==(const DenseVector&, const DenseVector&) = default;
};

struct MessageFeatures {
  /// Original message; entity values are cut from it.
  std::string text;
  std::vector<Token> tokens;
  std::vector<SparseVector> token_sparse;
  std::vector<DenseVector> token_dense;
  SparseVector sentence_sparse;
  DenseVector sentence_dense;

  std::size_t sparse_dim() const { return sentence_sparse.dim; }
  std::size_t dense_dim() const { return sentence_dense.dim(); }
};

/// Output of one sparse featurizer.
struct SparseBlock {
  std::vector<SparseVector> tokens;
  SparseVector sentence;
};

/// Output of one dense featurizer.
struct DenseBlock {
  std::vector<DenseVector> tokens;
  DenseVector sentence;
};

using FeaturizerOutput = std::variant<SparseBlock, DenseBlock>;

// --- count vectors -------------------------------------------------------

enum class Analyzer { CharWb, Word };

std::string_view to_string(Analyzer analyzer);
Analyzer analyzer_from_string(std::string_view name);

struct CountVectorVocab {
  Analyzer analyzer = Analyzer::CharWb;
  std::size_t min_ngram = 1;
  std::size_t max_ngram = 4;
  /// n-gram -> feature index; indices follow the sorted key order.
  std::map<std::string, std::uint32_t> index;

  std::size_t size() const { return index.size(); }
};

/// Vocabulary over every n-gram observed in the training tokens. With
/// char_wb each token is padded with one space per side and every window
/// of length min..max is collected.
CountVectorVocab fit_count_vocab(std::span<const std::vector<Token>> corpus, Analyzer analyzer,
                                 std::size_t min_ngram, std::size_t max_ngram);

/// The n-grams a token contributes at transform time. Windows made only of
/// padding are skipped: they occur in every token and carry no signal.
std::vector<std::string> token_ngrams(std::string_view token, const CountVectorVocab& vocab);

SparseBlock count_vector_featurize(std::span<const Token> tokens, const CountVectorVocab& vocab);

// --- regex ---------------------------------------------------------------

struct RegexPattern {
  std::string name;
  std::string pattern;
  std::regex compiled;
};

class RegexPatternSet {
 public:
  /// Throws Error(InvalidPattern) if the pattern does not compile or the
  /// name is already taken.
  void add(std::string name, std::string pattern);

  std::size_t size() const { return patterns_.size(); }
  bool empty() const { return patterns_.empty(); }
  const std::vector<RegexPattern>& patterns() const { return patterns_; }

 private:
  std::vector<RegexPattern> patterns_;
};

/// Parses `name<TAB>pattern` lines; blank lines and `#` comments skipped.
RegexPatternSet load_regex_patterns(std::string_view contents);

/// Token feature p is 1 when the token overlaps a match of pattern p; the
/// sentence feature p is 1 when pattern p matches anywhere.
SparseBlock regex_featurize(std::string_view message, std::span<const Token> tokens,
                            const RegexPatternSet& patterns);

// --- lexical / syntactic -------------------------------------------------

inline constexpr std::size_t kLexSynBuckets = 64;
/// BOS, EOS, is_digit, is_title_or_upper, prefix2 buckets, suffix2 buckets,
/// is_bangla_script.
inline constexpr std::size_t kLexSynWindowSize = 5 + 2 * kLexSynBuckets;
inline constexpr std::size_t kLexSynDim = 3 * kLexSynWindowSize;

namespace lexsyn {
inline constexpr std::size_t kBos = 0;
inline constexpr std::size_t kEos = 1;
inline constexpr std::size_t kDigit = 2;
inline constexpr std::size_t kTitle = 3;
inline constexpr std::size_t kPrefix = 4;
inline constexpr std::size_t kSuffix = kPrefix + kLexSynBuckets;
inline constexpr std::size_t kBangla = kSuffix + kLexSynBuckets;

/// Feature index for a window position in {-1, 0, +1}.
constexpr std::size_t index(int position, std::size_t feature) {
  return static_cast<std::size_t>(position + 1) * kLexSynWindowSize + feature;
}
}  // namespace lexsyn

std::vector<SparseVector> lexical_syntactic_featurize(std::span<const Token> tokens);

// --- dense ---------------------------------------------------------------

struct PretrainedTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

/// Deterministic stand-in for a learned embedding: the L2-normalised sum of
/// hashed basis vectors of a token's character trigrams.
struct HashedNGram {
  std::size_t dim = 128;
  std::uint64_t seed = 7;
};

using DenseSource = std::variant<PretrainedTable, HashedNGram>;

std::size_t dense_dim(const DenseSource& source);

/// Word-vector text format: a `count dim` header then `word v1 ... v_dim`
/// lines. Throws Error(HeaderMismatch) or Error(NonFiniteValue).
PretrainedTable load_pretrained_vectors(std::string_view contents);

/// Per-token vectors (zero vector for words missing from a table) and
/// their mean as the sentence vector.
DenseBlock dense_featurize(std::span<const Token> tokens, const DenseSource& source);

// --- assembly ------------------------------------------------------------

/// Concatenates featurizer outputs in pipeline order. Sparse blocks are
/// index-shifted into one space; dense blocks are appended. Throws
/// Error(TokenCountMismatch) when a block disagrees on the token count.
MessageFeatures assemble_features(std::vector<Token> tokens,
                                  std::span<const FeaturizerOutput> outputs);

}  // namespace bnlu
