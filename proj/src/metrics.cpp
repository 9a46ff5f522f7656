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

#include "phenotyper/metrics.hpp"

#include "phenotyper/error.hpp"

namespace phenotyper {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

void check_aligned(std::span<const DocumentLabels> predictions, std::span<const DocumentLabels> golds) {
  if (predictions.size() != golds.size()) {
    throw Error("metrics: " + std::to_string(predictions.size()) + " predictions for " +
                std::to_string(golds.size()) + " gold documents");
  }
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (predictions[i].id != golds[i].id) {
      throw Error("metrics: document " + std::to_string(i) + " is '" + predictions[i].id +
                  "' in predictions but '" + golds[i].id + "' in golds");
    }
  }
}

}  // namespace

LabelConfusion confusion_counts(std::span<const DocumentLabels> predictions,
                                std::span<const DocumentLabels> golds) {
  check_aligned(predictions, golds);
  LabelConfusion counts{};
  for (std::size_t i = 0; i < golds.size(); ++i) {
    for (Label l : kAllLabels) {
      const bool p = predictions[i].labels.contains(l);
      const bool g = golds[i].labels.contains(l);
      auto& c = counts[index_of(l)];
      if (p && g) {
        ++c.tp;
      } else if (p) {
        ++c.fp;
      } else if (g) {
        ++c.fn;
      } else {
        ++c.tn;
      }
    }
  }
  return counts;
}

BinaryMetrics metrics_from_counts(const ConfusionCounts& c) {
  BinaryMetrics m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = harmonic(m.precision, m.recall);
  return m;
}

BinaryMetrics label_metrics(std::span<const DocumentLabels> predictions, std::span<const DocumentLabels> golds,
                            Label label) {
  return metrics_from_counts(confusion_counts(predictions, golds)[index_of(label)]);
}

MicroMetrics micro_from_counts(const LabelConfusion& counts, double subset_accuracy) {
  ConfusionCounts pooled;
  for (const auto& c : counts) pooled += c;
  const BinaryMetrics m = metrics_from_counts(pooled);
  return {m.accuracy, m.precision, m.recall, m.f1, subset_accuracy};
}

MicroMetrics micro_metrics(std::span<const DocumentLabels> predictions, std::span<const DocumentLabels> golds) {
  const auto counts = confusion_counts(predictions, golds);
  std::size_t exact = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) exact += predictions[i].labels == golds[i].labels ? 1 : 0;
  return micro_from_counts(counts, ratio(exact, golds.size()));
}

}  // namespace phenotyper
