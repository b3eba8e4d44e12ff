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

#include "banglanlu/featurize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "banglanlu/errors.hpp"
#include "banglanlu/text.hpp"

namespace bnlu {

SparseVector SparseVector::from_map(std::size_t dim,
                                    const std::map<std::uint32_t, double>& entries) {
  SparseVector v{dim, {}, {}};
  v.indices.reserve(entries.size());
  v.values.reserve(entries.size());
  for (const auto& [index, value] : entries) {
    if (value == 0.0) continue;
    v.indices.push_back(index);
    v.values.push_back(value);
  }
  return v;
}

double SparseVector::at(std::uint32_t index) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

namespace {

SparseVector sum_rows(std::size_t dim, std::span<const SparseVector> rows) {
  std::map<std::uint32_t, double> acc;
  for (const SparseVector& row : rows) {
    for (std::size_t k = 0; k < row.nnz(); ++k) acc[row.indices[k]] += row.values[k];
  }
  return SparseVector::from_map(dim, acc);
}

std::vector<std::string> padded_windows(std::string_view token, std::size_t min_n,
                                        std::size_t max_n, bool keep_padding_only) {
  std::u32string padded = U" ";
  padded += text::decode(text::ascii_lower(token));
  padded += U' ';
  std::vector<std::string> grams;
  for (std::size_t n = min_n; n <= max_n; ++n) {
    if (n > padded.size()) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      const std::u32string_view window = std::u32string_view(padded).substr(i, n);
      if (!keep_padding_only &&
          std::all_of(window.begin(), window.end(), [](char32_t c) { return c == U' '; })) {
        continue;
      }
      grams.push_back(text::encode(window));
    }
  }
  return grams;
}

}  // namespace

std::string_view to_string(Analyzer analyzer) {
  return analyzer == Analyzer::CharWb ? "char_wb" : "word";
}

Analyzer analyzer_from_string(std::string_view name) {
  if (name == "char_wb") return Analyzer::CharWb;
  if (name == "word") return Analyzer::Word;
  throw Error(ErrorCode::ConfigError, "unknown analyzer `" + std::string(name) + "`");
}

CountVectorVocab fit_count_vocab(std::span<const std::vector<Token>> corpus, Analyzer analyzer,
                                 std::size_t min_ngram, std::size_t max_ngram) {
  if (min_ngram < 1 || min_ngram > max_ngram) {
    throw Error(ErrorCode::ConfigError, "ngram bounds must satisfy 1 <= min <= max");
  }
  CountVectorVocab vocab;
  vocab.analyzer = analyzer;
  vocab.min_ngram = min_ngram;
  vocab.max_ngram = max_ngram;
  std::set<std::string> seen;
  for (const auto& tokens : corpus) {
    for (const Token& token : tokens) {
      if (analyzer == Analyzer::Word) {
        seen.insert(text::ascii_lower(token.text));
      } else {
        for (auto& g : padded_windows(token.text, min_ngram, max_ngram, true)) {
          seen.insert(std::move(g));
        }
      }
    }
  }
  std::uint32_t next = 0;
  for (const auto& gram : seen) vocab.index.emplace(gram, next++);
  return vocab;
}

std::vector<std::string> token_ngrams(std::string_view token, const CountVectorVocab& vocab) {
  if (vocab.analyzer == Analyzer::Word) return {text::ascii_lower(token)};
  return padded_windows(token, vocab.min_ngram, vocab.max_ngram, false);
}

SparseBlock count_vector_featurize(std::span<const Token> tokens, const CountVectorVocab& vocab) {
  SparseBlock block;
  block.tokens.reserve(tokens.size());
  for (const Token& token : tokens) {
    std::map<std::uint32_t, double> counts;
    for (const std::string& gram : token_ngrams(token.text, vocab)) {
      if (auto it = vocab.index.find(gram); it != vocab.index.end()) counts[it->second] += 1.0;
    }
    block.tokens.push_back(SparseVector::from_map(vocab.size(), counts));
  }
  block.sentence = sum_rows(vocab.size(), block.tokens);
  return block;
}

void RegexPatternSet::add(std::string name, std::string pattern) {
  for (const auto& p : patterns_) {
    if (p.name == name) {
      throw Error(ErrorCode::InvalidPattern, "duplicate regex pattern name `" + name + "`");
    }
  }
  try {
    std::regex compiled(pattern, std::regex::ECMAScript);
    patterns_.push_back({std::move(name), std::move(pattern), std::move(compiled)});
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::InvalidPattern,
                "pattern `" + name + "` does not compile: " + e.what());
  }
}

RegexPatternSet load_regex_patterns(std::string_view contents) {
  RegexPatternSet set;
  std::istringstream in{std::string(contents)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || text::trim(line).starts_with("#")) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(ErrorCode::InvalidPattern,
                  "line " + std::to_string(number) + ": expected name<TAB>pattern");
    }
    set.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return set;
}

SparseBlock regex_featurize(std::string_view message, std::span<const Token> tokens,
                            const RegexPatternSet& patterns) {
  const std::size_t dim = patterns.size();
  std::vector<std::map<std::uint32_t, double>> per_token(tokens.size());
  std::map<std::uint32_t, double> sentence;
  const std::vector<std::size_t> offsets = text::byte_offsets(message);
  const auto to_cp = [&](std::size_t byte) {
    return static_cast<std::size_t>(
        std::lower_bound(offsets.begin(), offsets.end(), byte) - offsets.begin());
  };
  const std::string owned(message);

  for (std::size_t p = 0; p < dim; ++p) {
    const auto& re = patterns.patterns()[p].compiled;
    const auto index = static_cast<std::uint32_t>(p);
    for (auto it = std::sregex_iterator(owned.begin(), owned.end(), re);
         it != std::sregex_iterator(); ++it) {
      if (it->length() == 0) continue;
      const std::size_t s = to_cp(static_cast<std::size_t>(it->position()));
      const std::size_t e = to_cp(static_cast<std::size_t>(it->position() + it->length()));
      sentence[index] = 1.0;
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (s < tokens[t].end && tokens[t].start < e) per_token[t][index] = 1.0;
      }
    }
  }

  SparseBlock block;
  for (const auto& entries : per_token) block.tokens.push_back(SparseVector::from_map(dim, entries));
  block.sentence = SparseVector::from_map(dim, sentence);
  return block;
}

namespace {

std::size_t bucket(std::u32string_view piece) {
  return static_cast<std::size_t>(text::fnv1a64(text::encode(piece)) % kLexSynBuckets);
}

std::vector<std::size_t> token_traits(const Token& token, std::size_t position, std::size_t count) {
  const std::u32string cps = text::decode(token.text);
  std::vector<std::size_t> on;
  if (position == 0) on.push_back(lexsyn::kBos);
  if (position + 1 == count) on.push_back(lexsyn::kEos);
  if (!cps.empty() && std::all_of(cps.begin(), cps.end(), text::is_digit)) {
    on.push_back(lexsyn::kDigit);
  }
  if (!cps.empty() && cps.front() >= U'A' && cps.front() <= U'Z') on.push_back(lexsyn::kTitle);
  const std::u32string_view view(cps);
  on.push_back(lexsyn::kPrefix + bucket(view.substr(0, std::min<std::size_t>(2, cps.size()))));
  on.push_back(lexsyn::kSuffix +
               bucket(view.substr(cps.size() - std::min<std::size_t>(2, cps.size()))));
  if (std::any_of(cps.begin(), cps.end(), text::in_bangla_block)) on.push_back(lexsyn::kBangla);
  return on;
}

}  // namespace

std::vector<SparseVector> lexical_syntactic_featurize(std::span<const Token> tokens) {
  std::vector<std::vector<std::size_t>> traits;
  traits.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    traits.push_back(token_traits(tokens[i], i, tokens.size()));
  }
  std::vector<SparseVector> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::map<std::uint32_t, double> entries;
    for (int pos = -1; pos <= 1; ++pos) {
      const auto j = static_cast<std::ptrdiff_t>(i) + pos;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(tokens.size())) continue;
      for (std::size_t f : traits[static_cast<std::size_t>(j)]) {
        entries[static_cast<std::uint32_t>(lexsyn::index(pos, f))] = 1.0;
      }
    }
    out.push_back(SparseVector::from_map(kLexSynDim, entries));
  }
  return out;
}

std::size_t dense_dim(const DenseSource& source) {
  return std::visit([](const auto& s) { return s.dim; }, source);
}

PretrainedTable load_pretrained_vectors(std::string_view contents) {
  std::istringstream in{std::string(contents)};
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::HeaderMismatch, "missing header line");
  std::size_t count = 0;
  std::size_t dim = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> count >> dim) || (header >> extra)) {
      throw Error(ErrorCode::HeaderMismatch, "header must be `count dim`");
    }
  }
  PretrainedTable table;
  table.dim = dim;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<double> values;
    std::string field;
    while (fields >> field) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::HeaderMismatch,
                    "line " + std::to_string(number) + ": malformed value `" + field + "`");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteValue, "line " + std::to_string(number) + ": non-finite value");
      }
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw Error(ErrorCode::HeaderMismatch, "line " + std::to_string(number) + ": expected " +
                                                 std::to_string(dim) + " values, found " +
                                                 std::to_string(values.size()));
    }
    if (!table.vectors.emplace(word, std::move(values)).second) {
      throw Error(ErrorCode::HeaderMismatch,
                  "line " + std::to_string(number) + ": duplicate word `" + word + "`");
    }
  }
  if (table.vectors.size() != count) {
    throw Error(ErrorCode::HeaderMismatch, "header declares " + std::to_string(count) +
                                               " words, file has " +
                                               std::to_string(table.vectors.size()));
  }
  return table;
}

namespace {

DenseVector lookup(const PretrainedTable& table, const std::string& word) {
  auto it = table.vectors.find(word);
  if (it == table.vectors.end()) it = table.vectors.find(text::ascii_lower(word));
  if (it == table.vectors.end()) return DenseVector{std::vector<double>(table.dim, 0.0)};
  return DenseVector{it->second};
}

DenseVector hashed(const HashedNGram& source, const std::string& word) {
  std::vector<double> v(source.dim, 0.0);
  if (source.dim == 0) return DenseVector{v};
  std::u32string padded = U" ";
  padded += text::decode(text::ascii_lower(word));
  padded += U' ';
  const std::uint64_t basis = 0xcbf29ce484222325ULL ^ (source.seed * 0x9E3779B97F4A7C15ULL);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const std::uint64_t h = text::fnv1a64(text::encode(std::u32string_view(padded).substr(i, 3)), basis);
    v[h % source.dim] += 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
  return DenseVector{v};
}

}  // namespace

DenseBlock dense_featurize(std::span<const Token> tokens, const DenseSource& source) {
  DenseBlock block;
  const std::size_t dim = dense_dim(source);
  for (const Token& token : tokens) {
    block.tokens.push_back(std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, PretrainedTable>) {
            return lookup(s, token.text);
          } else {
            return hashed(s, token.text);
          }
        },
        source));
  }
  block.sentence.values.assign(dim, 0.0);
  if (!tokens.empty()) {
    for (const DenseVector& t : block.tokens) {
      for (std::size_t d = 0; d < dim; ++d) block.sentence.values[d] += t.values[d];
    }
    for (double& x : block.sentence.values) x /= static_cast<double>(tokens.size());
  }
  return block;
}

MessageFeatures assemble_features(std::vector<Token> tokens,
                                  std::span<const FeaturizerOutput> outputs) {
  const std::size_t n = tokens.size();
  std::size_t sparse_dim = 0;
  std::size_t dense_total = 0;
  for (const auto& out : outputs) {
    if (const auto* s = std::get_if<SparseBlock>(&out)) {
      if (s->tokens.size() != n) {
        throw Error(ErrorCode::TokenCountMismatch, "sparse block has " +
                                                       std::to_string(s->tokens.size()) +
                                                       " rows for " + std::to_string(n) + " tokens");
      }
      sparse_dim += s->sentence.dim;
    } else {
      const auto& d = std::get<DenseBlock>(out);
      if (d.tokens.size() != n) {
        throw Error(ErrorCode::TokenCountMismatch, "dense block has " +
                                                       std::to_string(d.tokens.size()) +
                                                       " rows for " + std::to_string(n) + " tokens");
      }
      dense_total += d.sentence.dim();
    }
  }

  MessageFeatures f;
  f.token_sparse.assign(n, SparseVector::zeros(sparse_dim));
  f.token_dense.assign(n, DenseVector{});
  f.sentence_sparse = SparseVector::zeros(sparse_dim);
  for (auto& d : f.token_dense) d.values.reserve(dense_total);
  f.sentence_dense.values.reserve(dense_total);

  const auto append = [](SparseVector& into, const SparseVector& block, std::uint32_t offset) {
    for (std::size_t k = 0; k < block.nnz(); ++k) {
      into.indices.push_back(block.indices[k] + offset);
      into.values.push_back(block.values[k]);
    }
  };

  std::uint32_t offset = 0;
  for (const auto& out : outputs) {
    if (const auto* s = std::get_if<SparseBlock>(&out)) {
      for (std::size_t t = 0; t < n; ++t) append(f.token_sparse[t], s->tokens[t], offset);
      append(f.sentence_sparse, s->sentence, offset);
      offset += static_cast<std::uint32_t>(s->sentence.dim);
    } else {
      const auto& d = std::get<DenseBlock>(out);
      for (std::size_t t = 0; t < n; ++t) {
        auto& dst = f.token_dense[t].values;
        dst.insert(dst.end(), d.tokens[t].values.begin(), d.tokens[t].values.end());
      }
      auto& dst = f.sentence_dense.values;
      dst.insert(dst.end(), d.sentence.values.begin(), d.sentence.values.end());
    }
  }
  f.tokens = std::move(tokens);
  return f;
}

}  // namespace bnlu
