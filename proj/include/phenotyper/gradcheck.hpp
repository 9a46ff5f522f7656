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

#include <string>
#include <vector>

#include "phenotyper/bundle.hpp"
#include "phenotyper/classifier.hpp"
#include "phenotyper/tokenizer.hpp"

namespace phenotyper {

struct GradCheckOptions {
  double step = 1e-5;
  // Parameters are moved to a generic point (uniform noise of this half-width
  // added to every entry) so that layer-norm scales, biases and attention
  // are all exercised away from their symmetric initial values. 0 keeps the
  // initialization.
  double spread = 0.5;
  // 0 checks every coordinate of every tensor.
  std::size_t max_coordinates_per_tensor = 0;
  std::uint64_t seed = 1;
  // Test hook: perturbs one analytic gradient entry before comparison.
  bool corrupt_analytic = false;
};

struct TensorGradError {
  std::string name;
  std::size_t coordinates = 0;
  double max_relative_error = 0.0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::vector<TensorGradError> tensors;
};

// |g_a - g_n| / max(|g_a|, |g_n|, 1e-8)
double relative_error(double analytic, double numeric);

// Compares the backward pass of `model` on the mean-BCE batch loss against
// central differences (f(p + h) - f(p - h)) / 2h, coordinate by coordinate.
GradCheckReport grad_check(TextClassifier<double> model, const std::vector<TokenSequence>& batch,
                           const Eigen::MatrixXd& targets, const GradCheckOptions& options = {});

// Runs grad_check under a strategy: one four-logit classifier, or each of the
// four single-logit classifiers against its binary targets. The report holds
// the maximum over all checked classifiers.
GradCheckReport grad_check(Strategy strategy, const EncoderConfig& config,
                           const std::vector<TokenSequence>& batch, const std::vector<LabelSet>& golds,
                           const GradCheckOptions& options = {});

// L=1, d=8, two heads, ffn 16, 32 positions.
EncoderConfig probe_config(std::size_t vocab_size, std::uint64_t seed = 7);

// Probe problem used by the CLI and the acceptance suite: a handful of short
// notes over a small vocabulary, including one made entirely of unknown words.
struct ProbeBatch {
  Vocabulary vocab;
  std::vector<TokenSequence> sequences;
  std::vector<LabelSet> golds;
};
ProbeBatch probe_batch();

}  // namespace phenotyper
