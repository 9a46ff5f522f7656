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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "phenotyper/bundle.hpp"
#include "phenotyper/classifier.hpp"
#include "phenotyper/corpus.hpp"
#include "phenotyper/error.hpp"
#include "phenotyper/rng.hpp"
#include "phenotyper/tokenizer.hpp"

namespace phenotyper {

struct TrainConfig {
  Strategy strategy = Strategy::kMultiLabel;
  double learning_rate = 2e-5;
  std::size_t batch_size = 8;
  std::size_t epochs = 20;
  double weight_decay = 0.01;
  std::uint64_t seed = 0;
  bool shuffle = true;

  // binary_relevance: lr 1e-5, batch 4, 5 epochs.
  // multi_label:      lr 2e-5, batch 8, 20 epochs. Weight decay 0.01 for both.
  static TrainConfig defaults(Strategy strategy);

  void validate() const;  // throws ConfigError
  bool operator==(const TrainConfig&) const = default;
};

// Missing fields keep the defaults of the strategy named in the document (or
// of `fallback` when it names none).
TrainConfig train_config_from_json(const nlohmann::json& j, Strategy fallback);
TrainConfig parse_train_config(const std::string& json_text, Strategy fallback = Strategy::kMultiLabel);
nlohmann::json to_json(const TrainConfig& config);

// Binary cross-entropy of one logit against a 0/1 target, evaluated as
// softplus(z) - y z so that saturated logits stay finite.
inline double bce_term(double logit, double target) {
  return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

struct BceResult {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // d loss / d logits, same shape as the logits
};

// Mean over every (item, label) entry; gradient (sigmoid(z) - y) / entries.
BceResult bce_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets);

struct AdamWHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// AdamW with decoupled weight decay:
//   m <- b1 m + (1 - b1) g,   v <- b2 v + (1 - b2) g^2
//   p <- p - lr (m_hat / (sqrt(v_hat) + eps) + wd * mask * p)
// where mask is 0 for tensors exempt from decay.
template <typename Scalar>
class AdamW {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit AdamW(Eigen::Index size, AdamWHyper hyper = {})
      : hyper_(hyper), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

  // Rejects the step without touching any state when a gradient is not finite.
  void step(Vector& params, const Vector& grads, double learning_rate, double weight_decay,
            const Vector& decay_mask) {
    if (params.size() != m_.size() || grads.size() != m_.size() || decay_mask.size() != m_.size()) {
      throw Error("adamw: parameter, gradient and state sizes differ");
    }
    if (!grads.allFinite()) {
      Eigen::Index at = 0;
      for (; at < grads.size() && std::isfinite(static_cast<double>(grads(at))); ++at) {
      }
      throw NumericalError("adamw: non-finite gradient at parameter " + std::to_string(at) +
                           " on step " + std::to_string(steps_ + 1));
    }
    ++steps_;
    const auto b1 = static_cast<Scalar>(hyper_.beta1);
    const auto b2 = static_cast<Scalar>(hyper_.beta2);
    const auto correction1 = static_cast<Scalar>(1.0 - std::pow(hyper_.beta1, static_cast<double>(steps_)));
    const auto correction2 = static_cast<Scalar>(1.0 - std::pow(hyper_.beta2, static_cast<double>(steps_)));
    const auto lr = static_cast<Scalar>(learning_rate);
    const auto wd = static_cast<Scalar>(weight_decay);
    const auto eps = static_cast<Scalar>(hyper_.eps);

    m_ = b1 * m_ + (Scalar(1) - b1) * grads;
    v_ = b2 * v_ + (Scalar(1) - b2) * grads.cwiseAbs2();
    params.array() -= lr * ((m_.array() / correction1) / ((v_.array() / correction2).sqrt() + eps) +
                            wd * decay_mask.array() * params.array());
  }

  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }
  std::size_t steps() const { return steps_; }

 private:
  AdamWHyper hyper_;
  Vector m_;
  Vector v_;
  std::size_t steps_ = 0;
};

struct EpochLoss {
  std::size_t epoch = 0;  // 1-based
  Strategy strategy = Strategy::kMultiLabel;
  std::optional<Label> label;  // binary relevance only
  double loss = 0.0;
};

// Work counters; one pass = one document through the encoder.
struct TrainStats {
  std::size_t encoder_forward_passes = 0;
  std::size_t encoder_backward_passes = 0;
  std::size_t optimizer_steps = 0;
  std::vector<EpochLoss> epoch_losses;
};

// Mean BCE of `model` over a batch and its gradient with respect to every
// parameter (accumulated into `grad`, which must be zeroed by the caller).
template <typename Scalar>
double batch_loss_and_gradient(const TextClassifier<Scalar>& model, std::span<const TokenSequence* const> batch,
                               const Eigen::MatrixXd& targets,
                               Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* grad,
                               TrainStats* stats = nullptr) {
  const auto outputs = static_cast<Eigen::Index>(model.outputs());
  const double entries = static_cast<double>(batch.size()) * static_cast<double>(outputs);
  typename TextClassifier<Scalar>::Cache cache;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto logits = model.forward(*batch[i], cache);
    if (stats) ++stats->encoder_forward_passes;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d_logits(outputs);
    for (Eigen::Index k = 0; k < outputs; ++k) {
      const double z = static_cast<double>(logits(k));
      const double y = targets(static_cast<Eigen::Index>(i), k);
      loss += bce_term(z, y);
      d_logits(k) = static_cast<Scalar>((sigmoid(z) - y) / entries);
    }
    if (grad) {
      model.backward(cache, d_logits, *grad);
      if (stats) ++stats->encoder_backward_passes;
    }
  }
  return loss / entries;
}

namespace detail {

// Trains one classifier in place on pre-tokenized documents with an
// (N x outputs) 0/1 target matrix.
template <typename Scalar>
void fit_classifier(TextClassifier<Scalar>& model, const std::vector<TokenSequence>& docs,
                    const Eigen::MatrixXd& targets, const TrainConfig& config, std::uint64_t shuffle_seed,
                    std::optional<Label> label, TrainStats* stats) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  AdamW<Scalar> optimizer(model.parameters().size());
  const Vector mask = model.decay_mask();
  Vector grad(model.parameters().size());
  Rng rng(shuffle_seed);

  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<const TokenSequence*> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle) rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      Eigen::MatrixXd batch_targets(static_cast<Eigen::Index>(end - start), targets.cols());
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&docs[order[i]]);
        batch_targets.row(static_cast<Eigen::Index>(i - start)) = targets.row(static_cast<Eigen::Index>(order[i]));
      }
      grad.setZero();
      const double loss = batch_loss_and_gradient(model, std::span<const TokenSequence* const>(batch),
                                                  batch_targets, &grad, stats);
      if (!std::isfinite(loss)) {
        throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(start / config.batch_size + 1) +
                             (label ? " (label " + std::string(label_name(*label)) + ")" : ""));
      }
      epoch_loss += loss * static_cast<double>(end - start);
      optimizer.step(model.parameters(), grad, config.learning_rate, config.weight_decay, mask);
      if (stats) ++stats->optimizer_steps;
    }
    if (stats) {
      stats->epoch_losses.push_back(
          {epoch, config.strategy, label, epoch_loss / static_cast<double>(std::max<std::size_t>(docs.size(), 1))});
    }
  }
}

}  // namespace detail

// Fine-tunes a freshly initialized bundle on `train_split`.
//
// binary_relevance: four independent runs, classifier l seeded with
// label_seed(encoder.seed, l) and shuffled with label_seed(train.seed, l).
// multi_label: one run on the 4-column targets. Batches follow a seeded
// reshuffle every epoch; the final-epoch parameters are returned.
template <typename Scalar>
ModelBundle<Scalar> train(const Corpus& train_split, const Vocabulary& vocab, EncoderConfig encoder,
                          const TrainConfig& config, TrainStats* stats = nullptr,
                          std::size_t max_len = kDefaultMaxLen) {
  if (train_split.empty()) throw Error("train: training split is empty");
  config.validate();
  encoder.vocab_size = vocab.size();
  encoder.validate(max_len);

  std::vector<TokenSequence> docs;
  docs.reserve(train_split.size());
  for (const auto& doc : train_split) docs.push_back(tokenize(doc.text, vocab, max_len, false));

  auto bundle = ModelBundle<Scalar>::initialize(config.strategy, encoder);
  const auto n = static_cast<Eigen::Index>(docs.size());
  if (config.strategy == Strategy::kMultiLabel) {
    Eigen::MatrixXd targets(n, static_cast<Eigen::Index>(kNumLabels));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Label l : kAllLabels) {
        targets(i, static_cast<Eigen::Index>(index_of(l))) =
            train_split[static_cast<std::size_t>(i)].gold.contains(l) ? 1.0 : 0.0;
      }
    }
    detail::fit_classifier(bundle.classifiers[0], docs, targets, config, config.seed, std::nullopt, stats);
  } else {
    for (Label l : kAllLabels) {
      Eigen::MatrixXd targets(n, 1);
      for (const auto& row : binary_relevance_transform(train_split, l)) {
        targets(static_cast<Eigen::Index>(row.document), 0) = row.target;
      }
      detail::fit_classifier(bundle.classifiers[index_of(l)], docs, targets, config,
                             label_seed(config.seed, l), l, stats);
    }
  }
  return bundle;
}

}  // namespace phenotyper
