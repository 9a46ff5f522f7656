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

#include "phenotyper/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "phenotyper/training.hpp"

namespace phenotyper {
namespace {

double loss_at(const TextClassifier<double>& model, std::span<const TokenSequence* const> batch,
               const Eigen::MatrixXd& targets) {
  return batch_loss_and_gradient<double>(model, batch, targets, nullptr);
}

std::vector<Eigen::Index> coordinates_for(const TensorSlot& slot, std::size_t cap, Rng& rng) {
  std::vector<Eigen::Index> coords;
  const auto n = static_cast<std::size_t>(slot.size());
  if (cap == 0 || n <= cap) {
    for (std::size_t i = 0; i < n; ++i) coords.push_back(slot.offset + static_cast<Eigen::Index>(i));
    return coords;
  }
  for (std::size_t i = 0; i < cap; ++i) coords.push_back(slot.offset + static_cast<Eigen::Index>(rng.below(n)));
  return coords;
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(TextClassifier<double> model, const std::vector<TokenSequence>& batch,
                           const Eigen::MatrixXd& targets, const GradCheckOptions& options) {
  Rng rng(options.seed);
  if (options.spread > 0) {
    auto& p = model.parameters();
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += options.spread * (2.0 * rng.uniform() - 1.0);
  }

  std::vector<const TokenSequence*> items;
  for (const auto& s : batch) items.push_back(&s);
  const std::span<const TokenSequence* const> view(items);

  Eigen::VectorXd analytic = Eigen::VectorXd::Zero(model.parameters().size());
  batch_loss_and_gradient<double>(model, view, targets, &analytic);
  if (options.corrupt_analytic) {
    const auto& slot = model.layout().slots[model.layout().head_bias];
    analytic(slot.offset) = analytic(slot.offset) * 1.01 + 1e-3;
  }

  GradCheckReport report;
  auto& params = model.parameters();
  const double h = options.step;
  for (const auto& slot : model.layout().slots) {
    TensorGradError tensor{slot.name, 0, 0.0};
    for (Eigen::Index i : coordinates_for(slot, options.max_coordinates_per_tensor, rng)) {
      const double saved = params(i);
      params(i) = saved + h;
      const double up = loss_at(model, view, targets);
      params(i) = saved - h;
      const double down = loss_at(model, view, targets);
      params(i) = saved;
      const double numeric = (up - down) / (2.0 * h);
      tensor.max_relative_error = std::max(tensor.max_relative_error, relative_error(analytic(i), numeric));
      ++tensor.coordinates;
    }
    report.coordinates += tensor.coordinates;
    report.max_relative_error = std::max(report.max_relative_error, tensor.max_relative_error);
    report.tensors.push_back(std::move(tensor));
  }
  return report;
}

GradCheckReport grad_check(Strategy strategy, const EncoderConfig& config,
                           const std::vector<TokenSequence>& batch, const std::vector<LabelSet>& golds,
                           const GradCheckOptions& options) {
  if (batch.size() != golds.size()) throw Error("grad_check: batch and labels differ in length");
  const auto bundle = ModelBundle<double>::initialize(strategy, config);
  const auto n = static_cast<Eigen::Index>(batch.size());

  GradCheckReport merged;
  for (std::size_t c = 0; c < bundle.classifiers.size(); ++c) {
    const auto& model = bundle.classifiers[c];
    Eigen::MatrixXd targets(n, static_cast<Eigen::Index>(model.outputs()));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (strategy == Strategy::kMultiLabel) {
        for (Label l : kAllLabels) {
          targets(i, static_cast<Eigen::Index>(index_of(l))) = golds[static_cast<std::size_t>(i)].contains(l);
        }
      } else {
        targets(i, 0) = golds[static_cast<std::size_t>(i)].contains(kAllLabels[c]);
      }
    }
    GradCheckOptions per = options;
    per.seed = derive_seed(options.seed, c);
    auto report = grad_check(model, batch, targets, per);
    const std::string prefix =
        strategy == Strategy::kMultiLabel ? "" : std::string(label_name(kAllLabels[c])) + ".";
    for (auto& t : report.tensors) {
      t.name = prefix + t.name;
      merged.tensors.push_back(std::move(t));
    }
    merged.coordinates += report.coordinates;
    merged.max_relative_error = std::max(merged.max_relative_error, report.max_relative_error);
  }
  return merged;
}

EncoderConfig probe_config(std::size_t vocab_size, std::uint64_t seed) {
  EncoderConfig c;
  c.num_layers = 1;
  c.hidden = 8;
  c.heads = 2;
  c.ffn = 16;
  c.max_positions = 32;
  c.vocab_size = vocab_size;
  c.seed = seed;
  return c;
}

ProbeBatch probe_batch() {
  const Corpus corpus({
      {"p1", "Patient endorses suicidal ideation.", {Label::SI}},
      {"p2", "Made a suicide attempt by overdose and cuts her arms.", {Label::SA, Label::NSSI}},
      {"p3", "Friend attempted suicide last year.", {Label::ES}},
      {"p4", "Sleep and appetite are fair.", {}},
  });
  ProbeBatch probe{build_vocab(corpus, 1), {}, {}};
  for (const auto& doc : corpus) {
    probe.sequences.push_back(tokenize(doc.text, probe.vocab, 16, false));
    probe.golds.push_back(doc.gold);
  }
  // Only unknown words: every token maps to [UNK].
  probe.sequences.push_back(tokenize("zzz qqq xxx", probe.vocab, 16, true));
  probe.golds.push_back(LabelSet{Label::SI});
  return probe;
}

}  // namespace phenotyper
