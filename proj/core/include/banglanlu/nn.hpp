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

// Small dense-network toolkit with explicit backward passes: named
// parameter sets, Adam, and a pre-norm transformer encoder over packed
// variable-length sequences. Shared by the NLU classifier and the
// dialogue policy.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "banglanlu/rng.hpp"

namespace bnlu::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
};

/// Ordered collection of named tensors. Gradients and optimizer moments
/// use the same layout as the parameters they describe.
class ParameterSet {
 public:
  std::size_t add(std::string name, Eigen::Index rows, Eigen::Index cols);

  Matrix& operator[](std::size_t i) { return params_[i].value; }
  const Matrix& operator[](std::size_t i) const { return params_[i].value; }

  std::size_t size() const { return params_.size(); }
  const std::string& name(std::size_t i) const { return params_[i].name; }
  /// Index of the named tensor; throws Error(ArchiveFormat) if absent.
  std::size_t index_of(const std::string& name) const;

  std::vector<Parameter>& entries() { return params_; }
  const std::vector<Parameter>& entries() const { return params_; }

  ParameterSet zeros_like() const;
  void set_zero();
  std::size_t total_size() const;
  bool all_finite() const;

 private:
  std::vector<Parameter> params_;
};

class Adam {
 public:
  Adam(const ParameterSet& layout, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8);

  /// Decoupled weight decay: every tensor except biases and LayerNorm
  /// gains shrinks by (1 - lr * rate) before the Adam update.
  void set_weight_decay(double rate);
  /// Multiplies the learning rate of every tensor whose name starts with
  /// `prefix` by `factor`.
  void scale_learning_rate(std::string_view prefix, double factor);
  /// Replaces the base learning rate, e.g. for a schedule.
  void set_learning_rate(double learning_rate) { lr_ = learning_rate; }

  void step(ParameterSet& params, const ParameterSet& grads);

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  double weight_decay_ = 0.0;
  std::vector<double> lr_scale_;
  std::vector<bool> decays_;
  double beta1_t_ = 1.0;
  double beta2_t_ = 1.0;
  ParameterSet m_;
  ParameterSet v_;
};

void init_uniform(Matrix& m, Rng& rng, double limit);

/// Row-wise softmax, numerically stabilised.
Matrix softmax_rows(const Matrix& logits);

/// Mean cross-entropy of `logits` rows against integer targets; writes
/// d(mean loss)/d(logits) scaled by `weight` into `dlogits`.
double softmax_cross_entropy(const Matrix& logits, std::span<const int> targets,
                             double weight, Matrix& dlogits);

// --- layers ----------------------------------------------------------------

struct LayerNormCache {
  Matrix xhat;
  Vector inv_std;
};

struct LayerNorm {
  std::size_t gain = 0;
  std::size_t bias = 0;

  void declare(ParameterSet& params, const std::string& prefix, Eigen::Index dim);
  Matrix forward(const ParameterSet& params, const Matrix& x, LayerNormCache& cache) const;
  Matrix backward(const ParameterSet& params, const Matrix& dy, const LayerNormCache& cache,
                  ParameterSet& grads) const;
};

struct AttentionCache {
  Matrix x;
  Matrix q;
  Matrix k;
  Matrix v;
  Matrix context;
  std::vector<Matrix> probs;  // one per (sequence, head)
};

/// Multi-head self-attention restricted to each packed sequence.
struct SelfAttention {
  Eigen::Index dim = 0;
  Eigen::Index heads = 1;
  std::size_t wq = 0, bq = 0, wk = 0, bk = 0, wv = 0, bv = 0, wo = 0, bo = 0;

  void declare(ParameterSet& params, const std::string& prefix, Eigen::Index dim,
               Eigen::Index heads);
  Matrix forward(const ParameterSet& params, const Matrix& x,
                 std::span<const std::size_t> offsets, AttentionCache& cache) const;
  Matrix backward(const ParameterSet& params, const Matrix& dy,
                  std::span<const std::size_t> offsets, const AttentionCache& cache,
                  ParameterSet& grads) const;
};

struct FeedForwardCache {
  Matrix x;
  Matrix pre;
};

/// Two linear maps with a tanh-approximated GELU in between.
struct FeedForward {
  std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0;

  void declare(ParameterSet& params, const std::string& prefix, Eigen::Index dim,
               Eigen::Index hidden);
  Matrix forward(const ParameterSet& params, const Matrix& x, FeedForwardCache& cache) const;
  Matrix backward(const ParameterSet& params, const Matrix& dy, const FeedForwardCache& cache,
                  ParameterSet& grads) const;
};

struct EncoderConfig {
  Eigen::Index dim = 128;
  Eigen::Index heads = 4;
  Eigen::Index hidden = 256;
  std::size_t layers = 2;
};

struct EncoderBlockCache {
  LayerNormCache ln1;
  AttentionCache attention;
  LayerNormCache ln2;
  FeedForwardCache ffn;
};

struct EncoderCache {
  std::vector<EncoderBlockCache> blocks;
  LayerNormCache final_norm;
};

/// Stack of pre-norm residual blocks followed by a final LayerNorm. With
/// zero layers it is the identity map.
class Encoder {
 public:
  void declare(ParameterSet& params, const std::string& prefix, const EncoderConfig& config);

  const EncoderConfig& config() const { return config_; }

  Matrix forward(const ParameterSet& params, const Matrix& x,
                 std::span<const std::size_t> offsets, EncoderCache& cache) const;
  Matrix backward(const ParameterSet& params, const Matrix& dy,
                  std::span<const std::size_t> offsets, const EncoderCache& cache,
                  ParameterSet& grads) const;

 private:
  struct Block {
    LayerNorm ln1;
    SelfAttention attention;
    LayerNorm ln2;
    FeedForward ffn;
  };
  EncoderConfig config_;
  std::vector<Block> blocks_;
  LayerNorm final_norm_;
};

/// Fills every tensor: names ending in ".gain" with 1, ".bias" with 0, and
/// everything else uniformly in [-limit, limit], in declaration order.
void initialize(ParameterSet& params, Rng& rng, double limit = 0.1);

}  // namespace bnlu::nn
