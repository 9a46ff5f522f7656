//
// Copyright 2026 The Phenotyper Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "phenotyper/encoder_config.hpp"
#include "phenotyper/error.hpp"
#include "phenotyper/rng.hpp"
#include "phenotyper/tokenizer.hpp"

namespace phenotyper {

inline constexpr double kInitStddev = 0.02;
inline constexpr double kLayerNormEps = 1e-5;

namespace detail {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Row-wise layer norm. Keeps the normalized input and the reciprocal standard
// deviation for the backward pass.
template <typename Scalar, typename Input, typename Scale, typename Shift>
Matrix<Scalar> layer_norm(const Eigen::MatrixBase<Input>& x, const Scale& scale, const Shift& shift,
                          Matrix<Scalar>& normalized, Vector<Scalar>& rstd) {
  const Eigen::Index n = x.rows();
  const auto width = static_cast<Scalar>(x.cols());
  normalized.resize(n, x.cols());
  rstd.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Scalar mean = x.row(r).sum() / width;
    const auto centered = (x.row(r).array() - mean).matrix();
    const Scalar var = centered.squaredNorm() / width;
    rstd(r) = Scalar(1) / std::sqrt(var + static_cast<Scalar>(kLayerNormEps));
    normalized.row(r) = centered * rstd(r);
  }
  Matrix<Scalar> out = normalized.array().rowwise() * scale.row(0).array();
  out.rowwise() += shift.row(0);
  return out;
}

template <typename Scalar, typename Scale, typename GradScale, typename GradShift>
Matrix<Scalar> layer_norm_backward(const Matrix<Scalar>& d_out, const Matrix<Scalar>& normalized,
                                   const Vector<Scalar>& rstd, const Scale& scale,
                                   GradScale&& d_scale, GradShift&& d_shift) {
  d_scale.row(0) += (d_out.array() * normalized.array()).matrix().colwise().sum();
  d_shift.row(0) += d_out.colwise().sum();
  const Matrix<Scalar> d_norm = d_out.array().rowwise() * scale.row(0).array();
  const auto width = static_cast<Scalar>(d_out.cols());
  Matrix<Scalar> d_in(d_out.rows(), d_out.cols());
  for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
    const Scalar mean_d = d_norm.row(r).sum() / width;
    const Scalar mean_dx = d_norm.row(r).dot(normalized.row(r)) / width;
    d_in.row(r) =
        rstd(r) * (d_norm.row(r).array() - mean_d - normalized.row(r).array() * mean_dx).matrix();
  }
  return d_in;
}

template <typename Scalar>
Scalar gelu(Scalar x) {
  return Scalar(0.5) * x * (Scalar(1) + std::erf(x * static_cast<Scalar>(std::numbers::sqrt2 / 2)));
}

template <typename Scalar>
Scalar gelu_derivative(Scalar x) {
  const Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(x * static_cast<Scalar>(std::numbers::sqrt2 / 2)));
  const Scalar pdf = std::exp(Scalar(-0.5) * x * x) * static_cast<Scalar>(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

}  // namespace detail

// Pre-norm transformer encoder followed by a linear head over the [CLS]
// position. All parameters live in one flat vector laid out by
// ClassifierLayout, so optimizers and checkpoints treat them uniformly.
//
// Per layer:  x <- x + Attention(LN(x));  x <- x + FFN(LN(x))
// then        pooled = LN_final(x[0]);    logits = W pooled + b
template <typename Scalar>
class TextClassifier {
 public:
  using Matrix = detail::Matrix<Scalar>;
  using Vector = detail::Vector<Scalar>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using TensorMap = Eigen::Map<Matrix>;
  using ConstTensorMap = Eigen::Map<const Matrix>;

  struct LayerCache {
    Matrix input;  // rows x hidden
    Matrix attn_norm, attn_in;
    Vector attn_rstd;
    Matrix query, key, value;
    std::vector<Matrix> probs;  // per head, query rows x valid length
    Matrix context;
    Matrix mid;
    Matrix ffn_norm, ffn_in;
    Vector ffn_rstd;
    Matrix ffn_pre, ffn_act;
  };

  struct Cache {
    std::vector<TokenId> ids;
    Eigen::Index valid = 0;
    std::vector<LayerCache> layers;
    Matrix final_norm;  // 1 x hidden
    Vector final_rstd;
    RowVector pooled;
    Vector logits;
  };

  TextClassifier() = default;

  // Parameters initialized from config.seed.
  TextClassifier(const EncoderConfig& config, std::size_t outputs)
      : config_(config), layout_(ClassifierLayout::make(config, outputs)) {
    config_.validate();
    initialize(config.seed);
  }

  // Weights ~ N(0, 0.02) truncated at two standard deviations, biases and
  // norm shifts zero, norm scales one.
  void initialize(std::uint64_t seed) {
    params_.resize(layout_.total);
    Rng rng(seed);
    for (const auto& slot : layout_.slots) {
      auto t = params_.segment(slot.offset, slot.size());
      switch (slot.init) {
        case TensorInit::kTruncatedNormal:
          for (Eigen::Index i = 0; i < t.size(); ++i) {
            t(i) = static_cast<Scalar>(rng.truncated_normal(kInitStddev));
          }
          break;
        case TensorInit::kOnes:
          t.setOnes();
          break;
        case TensorInit::kZeros:
          t.setZero();
          break;
      }
    }
  }

  const EncoderConfig& config() const { return config_; }
  const ClassifierLayout& layout() const { return layout_; }
  std::size_t outputs() const { return layout_.outputs; }
  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  TensorMap tensor(std::size_t slot) { return view(params_, slot); }
  ConstTensorMap tensor(std::size_t slot) const { return view(params_, slot); }

  TensorMap view(Vector& flat, std::size_t slot) const {
    const auto& s = layout_.slots[slot];
    return TensorMap(flat.data() + s.offset, s.rows, s.cols);
  }
  ConstTensorMap view(const Vector& flat, std::size_t slot) const {
    const auto& s = layout_.slots[slot];
    return ConstTensorMap(flat.data() + s.offset, s.rows, s.cols);
  }

  // 1 for tensors under weight decay, 0 for biases and norm parameters.
  Vector decay_mask() const {
    Vector mask = Vector::Zero(layout_.total);
    for (const auto& s : layout_.slots) {
      if (s.decay) mask.segment(s.offset, s.size()).setOnes();
    }
    return mask;
  }

  // Logits for one sequence. Padding (mask 0, always a suffix) is masked out
  // of every attention softmax by never entering the computation: a masked
  // key gets weight exactly zero and pad query rows never reach [CLS], so
  // only the valid prefix is encoded. This also makes the result bitwise
  // independent of the padded length. With `all_query_rows` the last layer
  // computes every valid position instead of only [CLS]; the pooled output is
  // the same.
  Vector forward(const TokenSequence& seq, Cache& cache, bool all_query_rows = false) const {
    const auto d = static_cast<Eigen::Index>(config_.hidden);
    const auto length = static_cast<Eigen::Index>(seq.size());
    if (length == 0) throw Error("encode: empty token sequence");
    if (length > static_cast<Eigen::Index>(config_.max_positions)) {
      throw Error("encode: sequence length " + std::to_string(length) + " exceeds max positions " +
                  std::to_string(config_.max_positions));
    }
    cache.ids = seq.ids;
    cache.valid = static_cast<Eigen::Index>(seq.valid_length());
    if (cache.valid == 0) throw Error("encode: sequence has no valid positions");

    const auto tok = tensor(layout_.token_embedding);
    const auto pos = tensor(layout_.position_embedding);
    Matrix x(cache.valid, d);
    for (Eigen::Index t = 0; t < length; ++t) {
      const TokenId id = seq.ids[static_cast<std::size_t>(t)];
      if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
        throw Error("encode: token id " + std::to_string(id) + " out of range for vocabulary of " +
                    std::to_string(config_.vocab_size));
      }
      if (t < cache.valid) x.row(t) = tok.row(id) + pos.row(t);
    }

    cache.layers.resize(config_.num_layers);
    for (std::size_t l = 0; l < config_.num_layers; ++l) {
      const bool last = l + 1 == config_.num_layers;
      const Eigen::Index rows = (last && !all_query_rows) ? 1 : cache.valid;
      x = layer_forward(l, std::move(x), rows, cache.layers[l]);
    }

    cache.pooled = detail::layer_norm<Scalar>(x.topRows(1), tensor(layout_.final_norm_scale),
                                              tensor(layout_.final_norm_shift), cache.final_norm,
                                              cache.final_rstd);
    cache.logits = tensor(layout_.head_weight) * cache.pooled.transpose() +
                   tensor(layout_.head_bias).col(0);
    return cache.logits;
  }

  Vector logits(const TokenSequence& seq) const {
    Cache cache;
    return forward(seq, cache);
  }

  // Pooled representation: final-normed hidden state at [CLS].
  RowVector encode(const TokenSequence& seq) const {
    Cache cache;
    forward(seq, cache);
    return cache.pooled;
  }

  // Attention probabilities of `layer`, one matrix per head with a row per
  // valid query and a column per position; pad columns are zero.
  std::vector<Matrix> attention(const TokenSequence& seq, std::size_t layer) const {
    Cache cache;
    forward(seq, cache, true);
    std::vector<Matrix> out;
    for (const auto& p : cache.layers.at(layer).probs) {
      Matrix full = Matrix::Zero(p.rows(), static_cast<Eigen::Index>(seq.size()));
      full.leftCols(p.cols()) = p;
      out.push_back(std::move(full));
    }
    return out;
  }

  // Accumulates d(loss)/d(params) into `grad` given d(loss)/d(logits).
  void backward(const Cache& cache, const Vector& d_logits, Vector& grad) const {
    view(grad, layout_.head_weight).noalias() += d_logits * cache.pooled;
    view(grad, layout_.head_bias).col(0) += d_logits;
    const Matrix d_pooled = (d_logits.transpose() * tensor(layout_.head_weight));

    Matrix d_x = detail::layer_norm_backward<Scalar>(
        d_pooled, cache.final_norm, cache.final_rstd, tensor(layout_.final_norm_scale),
        view(grad, layout_.final_norm_scale), view(grad, layout_.final_norm_shift));

    for (std::size_t l = config_.num_layers; l-- > 0;) {
      d_x = layer_backward(l, d_x, cache.layers[l], grad);
    }

    // d_x covers as many rows as the first layer's query rows (all rows, or
    // just [CLS] when there are no layers).
    auto d_tok = view(grad, layout_.token_embedding);
    auto d_pos = view(grad, layout_.position_embedding);
    for (Eigen::Index t = 0; t < d_x.rows(); ++t) {
      d_tok.row(cache.ids[static_cast<std::size_t>(t)]) += d_x.row(t);
      d_pos.row(t) += d_x.row(t);
    }
  }

  Eigen::Index encoder_parameter_count() const { return layout_.encoder_size; }
  Eigen::Index head_parameter_count() const { return layout_.total - layout_.encoder_size; }

 private:
  Matrix layer_forward(std::size_t l, Matrix x, Eigen::Index rows, LayerCache& c) const {
    const LayerSlots& s = layout_.layers[l];
    const auto heads = static_cast<Eigen::Index>(config_.heads);
    const auto head_dim = static_cast<Eigen::Index>(config_.hidden / config_.heads);
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(head_dim));

    c.input = std::move(x);
    c.attn_in = detail::layer_norm<Scalar>(c.input, tensor(s.attn_norm_scale),
                                           tensor(s.attn_norm_shift), c.attn_norm, c.attn_rstd);
    c.query = c.attn_in.topRows(rows) * tensor(s.query_weight);
    c.query.rowwise() += tensor(s.query_bias).row(0);
    c.key = c.attn_in * tensor(s.key_weight);
    c.value = c.attn_in * tensor(s.value_weight);
    c.value.rowwise() += tensor(s.value_bias).row(0);

    c.probs.resize(static_cast<std::size_t>(heads));
    c.context.resize(rows, c.query.cols());
    for (Eigen::Index h = 0; h < heads; ++h) {
      Matrix& p = c.probs[static_cast<std::size_t>(h)];
      p.noalias() = scale * (c.query.middleCols(h * head_dim, head_dim) *
                             c.key.middleCols(h * head_dim, head_dim).transpose());
      for (Eigen::Index r = 0; r < rows; ++r) {
        const Scalar m = p.row(r).maxCoeff();
        p.row(r) = (p.row(r).array() - m).exp().matrix();
        p.row(r) /= p.row(r).sum();
      }
      c.context.middleCols(h * head_dim, head_dim).noalias() =
          p * c.value.middleCols(h * head_dim, head_dim);
    }

    c.mid = c.input.topRows(rows) + c.context * tensor(s.output_weight);
    c.mid.rowwise() += tensor(s.output_bias).row(0);

    c.ffn_in = detail::layer_norm<Scalar>(c.mid, tensor(s.ffn_norm_scale), tensor(s.ffn_norm_shift),
                                          c.ffn_norm, c.ffn_rstd);
    c.ffn_pre = c.ffn_in * tensor(s.ffn_in_weight);
    c.ffn_pre.rowwise() += tensor(s.ffn_in_bias).row(0);
    c.ffn_act = c.ffn_pre.unaryExpr([](Scalar v) { return detail::gelu(v); });
    Matrix out = c.mid + c.ffn_act * tensor(s.ffn_out_weight);
    out.rowwise() += tensor(s.ffn_out_bias).row(0);
    return out;
  }

  // d_out has one row per query row of the layer; the result covers every
  // input row.
  Matrix layer_backward(std::size_t l, const Matrix& d_out, const LayerCache& c, Vector& grad) const {
    const LayerSlots& s = layout_.layers[l];
    const Eigen::Index rows = d_out.rows();
    const auto heads = static_cast<Eigen::Index>(config_.heads);
    const auto head_dim = static_cast<Eigen::Index>(config_.hidden / config_.heads);
    const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(head_dim));

    // Feed-forward block.
    view(grad, s.ffn_out_weight).noalias() += c.ffn_act.transpose() * d_out;
    view(grad, s.ffn_out_bias).row(0) += d_out.colwise().sum();
    Matrix d_pre = d_out * tensor(s.ffn_out_weight).transpose();
    d_pre.array() *= c.ffn_pre.unaryExpr([](Scalar v) { return detail::gelu_derivative(v); }).array();
    view(grad, s.ffn_in_weight).noalias() += c.ffn_in.transpose() * d_pre;
    view(grad, s.ffn_in_bias).row(0) += d_pre.colwise().sum();
    const Matrix d_ffn_in = d_pre * tensor(s.ffn_in_weight).transpose();
    Matrix d_mid = d_out + detail::layer_norm_backward<Scalar>(
                               d_ffn_in, c.ffn_norm, c.ffn_rstd, tensor(s.ffn_norm_scale),
                               view(grad, s.ffn_norm_scale), view(grad, s.ffn_norm_shift));

    // Attention block.
    view(grad, s.output_weight).noalias() += c.context.transpose() * d_mid;
    view(grad, s.output_bias).row(0) += d_mid.colwise().sum();
    const Matrix d_context = d_mid * tensor(s.output_weight).transpose();

    Matrix d_query(rows, c.query.cols());
    Matrix d_key(c.key.rows(), c.key.cols());
    Matrix d_value(c.value.rows(), c.value.cols());
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Matrix& p = c.probs[static_cast<std::size_t>(h)];
      const auto dc = d_context.middleCols(h * head_dim, head_dim);
      d_value.middleCols(h * head_dim, head_dim).noalias() = p.transpose() * dc;
      Matrix d_scores = dc * c.value.middleCols(h * head_dim, head_dim).transpose();
      const Vector row_dot = (d_scores.array() * p.array()).rowwise().sum();
      d_scores = (p.array() * (d_scores.array().colwise() - row_dot.array())).matrix();
      d_query.middleCols(h * head_dim, head_dim).noalias() =
          scale * (d_scores * c.key.middleCols(h * head_dim, head_dim));
      d_key.middleCols(h * head_dim, head_dim).noalias() =
          scale * (d_scores.transpose() * c.query.middleCols(h * head_dim, head_dim));
    }

    const auto attn_top = c.attn_in.topRows(rows);
    view(grad, s.query_weight).noalias() += attn_top.transpose() * d_query;
    view(grad, s.query_bias).row(0) += d_query.colwise().sum();
    view(grad, s.key_weight).noalias() += c.attn_in.transpose() * d_key;
    view(grad, s.value_weight).noalias() += c.attn_in.transpose() * d_value;
    view(grad, s.value_bias).row(0) += d_value.colwise().sum();

    Matrix d_attn_in = d_key * tensor(s.key_weight).transpose();
    d_attn_in.noalias() += d_value * tensor(s.value_weight).transpose();
    d_attn_in.topRows(rows).noalias() += d_query * tensor(s.query_weight).transpose();

    Matrix d_in = detail::layer_norm_backward<Scalar>(d_attn_in, c.attn_norm, c.attn_rstd,
                                                      tensor(s.attn_norm_scale),
                                                      view(grad, s.attn_norm_scale),
                                                      view(grad, s.attn_norm_shift));
    d_in.topRows(rows) += d_mid;
    return d_in;
  }

  EncoderConfig config_;
  ClassifierLayout layout_;
  Vector params_;
};

}  // namespace phenotyper
