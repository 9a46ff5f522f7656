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

#include <array>
#include <span>
#include <string>

#include "phenotyper/labels.hpp"

namespace phenotyper {

struct DocumentLabels {
  std::string id;
  LabelSet labels;
};

// Document-level binary decisions for one label.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct BinaryMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Model-level scores. overall_accuracy counts each (document, label)
// decision; subset_accuracy requires the whole predicted set to match.
struct MicroMetrics {
  double overall_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double subset_accuracy = 0.0;
};

using LabelConfusion = std::array<ConfusionCounts, kNumLabels>;

// Throws when the two sequences do not list the same ids in the same order.
LabelConfusion confusion_counts(std::span<const DocumentLabels> predictions,
                                std::span<const DocumentLabels> golds);

// Any ratio with a zero denominator is reported as 0.
BinaryMetrics metrics_from_counts(const ConfusionCounts& counts);

BinaryMetrics label_metrics(std::span<const DocumentLabels> predictions, std::span<const DocumentLabels> golds,
                            Label label);

MicroMetrics micro_metrics(std::span<const DocumentLabels> predictions, std::span<const DocumentLabels> golds);

// Micro scores from per-label counts; subset accuracy needs the documents.
MicroMetrics micro_from_counts(const LabelConfusion& counts, double subset_accuracy);

}  // namespace phenotyper
