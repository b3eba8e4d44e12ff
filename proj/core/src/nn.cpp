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

#include "banglanlu/nn.hpp"

#include <cmath>

#include "banglanlu/errors.hpp"

namespace bnlu::nn {

std::size_t ParameterSet::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  params_.push_back({std::move(name), Matrix::Zero(rows, cols)});
  return params_.size() - 1;
}

std::size_t ParameterSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw Error(ErrorCode::ArchiveFormat, "missing parameter tensor `" + name + "`");
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  for (const auto& p : params_) out.add(p.name, p.value.rows(), p.value.cols());
  return out;
}

void ParameterSet::set_zero() {
  for (auto& p : params_) p.value.setZero();
}

std::size_t ParameterSet::total_size() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

bool ParameterSet::all_finite() const {
  for (const auto& p : params_) {
    if (!p.value.allFinite()) return false;
  }
  return true;
}

Adam::Adam(const ParameterSet& layout, double learning_rate, double beta1, double beta2,
           double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      lr_scale_(layout.size(), 1.0),
      decays_(layout.size(), false),
      m_(layout.zeros_like()),
      v_(layout.zeros_like()) {
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const std::string& name = layout.name(i);
    decays_[i] = !name.ends_with(".bias") && !name.ends_with(".gain");
  }
}

void Adam::set_weight_decay(double rate) { weight_decay_ = rate; }

void Adam::scale_learning_rate(std::string_view prefix, double factor) {
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (m_.name(i).starts_with(prefix)) lr_scale_[i] = factor;
  }
}

void Adam::step(ParameterSet& params, const ParameterSet& grads) {
  beta1_t_ *= beta1_;
  beta2_t_ *= beta2_;
  const double c1 = 1.0 - beta1_t_;
  const double c2 = 1.0 - beta2_t_;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = m_[i];
    auto& v = v_[i];
    const auto& g = grads[i];
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    const double lr = lr_ * lr_scale_[i];
    if (weight_decay_ > 0.0 && decays_[i]) params[i] *= 1.0 - lr * weight_decay_;
    params[i].array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }
}

void init_uniform(Matrix& m, Rng& rng, double limit) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-limit, limit);
  }
}

void initialize(ParameterSet& params, Rng& rng, double limit) {
  for (auto& p : params.entries()) {
    if (p.name.ends_with(".gain")) {
      p.value.setOnes();
    } else if (p.name.ends_with(".bias")) {
      p.value.setZero();
    } else {
      init_uniform(p.value, rng, limit);
    }
  }
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - mx).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

double softmax_cross_entropy(const Matrix& logits, std::span<const int> targets, double weight,
                             Matrix& dlogits) {
  const Eigen::Index n = logits.rows();
  dlogits = Matrix::Zero(n, logits.cols());
  if (n == 0) return 0.0;
  double loss = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mx = logits.row(r).maxCoeff();
    const auto shifted = (logits.row(r).array() - mx).eval();
    const double log_z = std::log(shifted.exp().sum());
    const int t = targets[static_cast<std::size_t>(r)];
    loss += log_z - shifted(t);
    dlogits.row(r) = (shifted - log_z).exp();
    dlogits(r, t) -= 1.0;
  }
  dlogits *= weight / static_cast<double>(n);
  return loss / static_cast<double>(n);
}

// --- LayerNorm ---------------------------------------------------------------

namespace {
constexpr double kNormEps = 1e-6;
}

void LayerNorm::declare(ParameterSet& params, const std::string& prefix, Eigen::Index dim) {
  gain = params.add(prefix + ".gain", 1, dim);
  bias = params.add(prefix + ".bias", 1, dim);
}

Matrix LayerNorm::forward(const ParameterSet& params, const Matrix& x,
                          LayerNormCache& cache) const {
  const Eigen::Index n = x.rows();
  const auto d = static_cast<double>(x.cols());
  cache.xhat.resize(n, x.cols());
  cache.inv_std.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = x.row(r).sum() / d;
    const auto centered = (x.row(r).array() - mean).eval();
    const double var = centered.square().sum() / d;
    const double inv = 1.0 / std::sqrt(var + kNormEps);
    cache.inv_std(r) = inv;
    cache.xhat.row(r) = centered * inv;
  }
  Matrix y = cache.xhat.array().rowwise() * params[gain].row(0).array();
  y.array().rowwise() += params[bias].row(0).array();
  return y;
}

Matrix LayerNorm::backward(const ParameterSet& params, const Matrix& dy,
                           const LayerNormCache& cache, ParameterSet& grads) const {
  grads[gain].row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  grads[bias].row(0) += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * params[gain].row(0).array();
  const auto d = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_dxhat = dxhat.row(r).sum() / d;
    const double mean_dxhat_xhat = dxhat.row(r).dot(cache.xhat.row(r)) / d;
    dx.row(r) = cache.inv_std(r) *
                (dxhat.row(r).array() - mean_dxhat - cache.xhat.row(r).array() * mean_dxhat_xhat);
  }
  return dx;
}

// --- SelfAttention -----------------------------------------------------------

void SelfAttention::declare(ParameterSet& params, const std::string& prefix, Eigen::Index d,
                            Eigen::Index h) {
  if (h <= 0 || d % h != 0) {
    throw Error(ErrorCode::ConfigError, "embedding width must be divisible by head count");
  }
  dim = d;
  heads = h;
  wq = params.add(prefix + ".query", d, d);
  bq = params.add(prefix + ".query.bias", 1, d);
  wk = params.add(prefix + ".key", d, d);
  bk = params.add(prefix + ".key.bias", 1, d);
  wv = params.add(prefix + ".value", d, d);
  bv = params.add(prefix + ".value.bias", 1, d);
  wo = params.add(prefix + ".output", d, d);
  bo = params.add(prefix + ".output.bias", 1, d);
}

Matrix SelfAttention::forward(const ParameterSet& params, const Matrix& x,
                              std::span<const std::size_t> offsets,
                              AttentionCache& cache) const {
  cache.x = x;
  cache.q = x * params[wq];
  cache.q.rowwise() += params[bq].row(0);
  cache.k = x * params[wk];
  cache.k.rowwise() += params[bk].row(0);
  cache.v = x * params[wv];
  cache.v.rowwise() += params[bv].row(0);
  cache.context = Matrix::Zero(x.rows(), dim);
  cache.probs.clear();

  const Eigen::Index head_dim = dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    const auto begin = static_cast<Eigen::Index>(offsets[s]);
    const auto len = static_cast<Eigen::Index>(offsets[s + 1] - offsets[s]);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const auto q = cache.q.block(begin, h * head_dim, len, head_dim);
      const auto k = cache.k.block(begin, h * head_dim, len, head_dim);
      const auto v = cache.v.block(begin, h * head_dim, len, head_dim);
      Matrix p = softmax_rows((q * k.transpose()) * scale);
      cache.context.block(begin, h * head_dim, len, head_dim) = p * v;
      cache.probs.push_back(std::move(p));
    }
  }
  Matrix y = cache.context * params[wo];
  y.rowwise() += params[bo].row(0);
  return y;
}

Matrix SelfAttention::backward(const ParameterSet& params, const Matrix& dy,
                               std::span<const std::size_t> offsets,
                               const AttentionCache& cache, ParameterSet& grads) const {
  grads[wo].noalias() += cache.context.transpose() * dy;
  grads[bo].row(0) += dy.colwise().sum();
  const Matrix dcontext = dy * params[wo].transpose();

  Matrix dq = Matrix::Zero(dy.rows(), dim);
  Matrix dk = Matrix::Zero(dy.rows(), dim);
  Matrix dv = Matrix::Zero(dy.rows(), dim);
  const Eigen::Index head_dim = dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::size_t slot = 0;
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    const auto begin = static_cast<Eigen::Index>(offsets[s]);
    const auto len = static_cast<Eigen::Index>(offsets[s + 1] - offsets[s]);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Matrix& p = cache.probs[slot++];
      const auto q = cache.q.block(begin, h * head_dim, len, head_dim);
      const auto k = cache.k.block(begin, h * head_dim, len, head_dim);
      const auto v = cache.v.block(begin, h * head_dim, len, head_dim);
      const auto dctx = dcontext.block(begin, h * head_dim, len, head_dim);
      const Matrix dp = dctx * v.transpose();
      dv.block(begin, h * head_dim, len, head_dim) = p.transpose() * dctx;
      Matrix dscores = p.array() * (dp.colwise() - (dp.array() * p.array()).rowwise().sum().matrix()).array();
      dscores *= scale;
      dq.block(begin, h * head_dim, len, head_dim) = dscores * k;
      dk.block(begin, h * head_dim, len, head_dim) = dscores.transpose() * q;
    }
  }

  grads[wq].noalias() += cache.x.transpose() * dq;
  grads[bq].row(0) += dq.colwise().sum();
  grads[wk].noalias() += cache.x.transpose() * dk;
  grads[bk].row(0) += dk.colwise().sum();
  grads[wv].noalias() += cache.x.transpose() * dv;
  grads[bv].row(0) += dv.colwise().sum();
  Matrix dx = dq * params[wq].transpose();
  dx.noalias() += dk * params[wk].transpose();
  dx.noalias() += dv * params[wv].transpose();
  return dx;
}

// --- FeedForward ---------------------------------------------------------------

namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

double gelu_grad(double x) {
  const double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
}

}  // namespace

void FeedForward::declare(ParameterSet& params, const std::string& prefix, Eigen::Index dim,
                          Eigen::Index hidden) {
  w1 = params.add(prefix + ".in", dim, hidden);
  b1 = params.add(prefix + ".in.bias", 1, hidden);
  w2 = params.add(prefix + ".out", hidden, dim);
  b2 = params.add(prefix + ".out.bias", 1, dim);
}

Matrix FeedForward::forward(const ParameterSet& params, const Matrix& x,
                            FeedForwardCache& cache) const {
  cache.x = x;
  cache.pre = x * params[w1];
  cache.pre.rowwise() += params[b1].row(0);
  const Matrix act = cache.pre.unaryExpr([](double v) { return gelu(v); });
  Matrix y = act * params[w2];
  y.rowwise() += params[b2].row(0);
  return y;
}

Matrix FeedForward::backward(const ParameterSet& params, const Matrix& dy,
                             const FeedForwardCache& cache, ParameterSet& grads) const {
  const Matrix act = cache.pre.unaryExpr([](double v) { return gelu(v); });
  grads[w2].noalias() += act.transpose() * dy;
  grads[b2].row(0) += dy.colwise().sum();
  Matrix dpre = dy * params[w2].transpose();
  dpre.array() *= cache.pre.unaryExpr([](double v) { return gelu_grad(v); }).array();
  grads[w1].noalias() += cache.x.transpose() * dpre;
  grads[b1].row(0) += dpre.colwise().sum();
  return dpre * params[w1].transpose();
}

// --- Encoder -------------------------------------------------------------------

void Encoder::declare(ParameterSet& params, const std::string& prefix,
                      const EncoderConfig& config) {
  config_ = config;
  blocks_.clear();
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::string p = prefix + ".layer" + std::to_string(l);
    Block b;
    b.ln1.declare(params, p + ".attention_norm", config.dim);
    b.attention.declare(params, p + ".attention", config.dim, config.heads);
    b.ln2.declare(params, p + ".ffn_norm", config.dim);
    b.ffn.declare(params, p + ".ffn", config.dim, config.hidden);
    blocks_.push_back(b);
  }
  if (config.layers > 0) final_norm_.declare(params, prefix + ".final_norm", config.dim);
}

Matrix Encoder::forward(const ParameterSet& params, const Matrix& x,
                        std::span<const std::size_t> offsets, EncoderCache& cache) const {
  cache.blocks.assign(blocks_.size(), {});
  if (blocks_.empty()) return x;
  Matrix h = x;
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    const Block& b = blocks_[l];
    auto& c = cache.blocks[l];
    h += b.attention.forward(params, b.ln1.forward(params, h, c.ln1), offsets, c.attention);
    h += b.ffn.forward(params, b.ln2.forward(params, h, c.ln2), c.ffn);
  }
  return final_norm_.forward(params, h, cache.final_norm);
}

Matrix Encoder::backward(const ParameterSet& params, const Matrix& dy,
                         std::span<const std::size_t> offsets, const EncoderCache& cache,
                         ParameterSet& grads) const {
  if (blocks_.empty()) return dy;
  Matrix dh = final_norm_.backward(params, dy, cache.final_norm, grads);
  for (std::size_t l = blocks_.size(); l-- > 0;) {
    const Block& b = blocks_[l];
    const auto& c = cache.blocks[l];
    const Matrix dffn = dh;
    dh += b.ln2.backward(params, b.ffn.backward(params, dffn, c.ffn, grads), c.ln2, grads);
    const Matrix dattention = dh;
    dh += b.ln1.backward(params, b.attention.backward(params, dattention, offsets, c.attention, grads),
                         c.ln1, grads);
  }
  return dh;
}

}  // namespace bnlu::nn
