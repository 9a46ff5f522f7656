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

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "phenotyper/bundle.hpp"
#include "phenotyper/corpus.hpp"
#include "phenotyper/folds.hpp"
#include "phenotyper/metrics.hpp"
#include "phenotyper/training.hpp"

namespace phenotyper {

// Everything retained from one (repeat, fold) evaluation of one model.
struct RunRecord {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t encoder_seed = 0;
  std::uint64_t train_seed = 0;
  std::size_t vocab_size = 0;
  LabelConfusion confusion{};
  std::array<BinaryMetrics, kNumLabels> per_label{};
  MicroMetrics micro;
  TrainStats training;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single run
};

MetricSummary summarize(const std::vector<double>& values);

struct LabelSummary {
  MetricSummary accuracy, precision, recall, f1;
};

struct ModelSummary {
  MetricSummary overall_accuracy, precision, recall, f1, subset_accuracy;
};

struct ModelReport {
  std::string name;
  std::vector<RunRecord> runs;  // ordered by (repeat, fold)
  ModelSummary model_level;
  std::array<LabelSummary, kNumLabels> label_level{};
};

// Mean and sample standard deviation of every metric over `runs`.
ModelReport aggregate(std::string name, std::vector<RunRecord> runs);

// Trains on `train` and returns one predicted label set per `test` document.
// `record` arrives with repeat/fold/sizes filled and may be annotated.
using FitPredict =
    std::function<std::vector<LabelSet>(const Corpus& train, const Corpus& test, RunRecord& record)>;

struct NamedModel {
  std::string name;
  FitPredict fit_predict;
};

// A training or prediction failure inside a fold.
class FoldError : public Error {
 public:
  FoldError(std::size_t repeat, std::size_t fold, const std::string& model, const std::string& what)
      : Error("repeat " + std::to_string(repeat) + ", fold " + std::to_string(fold) + " (" + model +
              "): " + what),
        repeat_(repeat),
        fold_(fold) {}
  std::size_t repeat() const { return repeat_; }
  std::size_t fold() const { return fold_; }

 private:
  std::size_t repeat_, fold_;
};

// Evaluates every model on every (repeat, fold) of `plan`. Runs execute on up
// to `jobs` threads; results are collected by index, so reports do not depend
// on completion order.
// `on_done` (optional) is called once per finished run, never concurrently.
using RunCallback = std::function<void(const std::string& model, const RunRecord& record)>;
std::vector<ModelReport> run_cross_validation(const Corpus& corpus, const FoldPlan& plan,
                                              const std::vector<NamedModel>& models, std::size_t jobs = 1,
                                              const RunCallback& on_done = {});

// Settings for the transformer classifiers.
struct TransformerSetup {
  EncoderConfig encoder;
  std::size_t max_len = kDefaultMaxLen;
  std::size_t min_frequency = 1;
  double threshold = kDefaultThreshold;
  std::uint64_t seed = 0;  // master seed; per-run seeds derive from it
};

// Seeds used by run (repeat, fold) of `strategy`.
std::uint64_t run_encoder_seed(std::uint64_t seed, std::size_t repeat, std::size_t fold, Strategy strategy);
std::uint64_t run_train_seed(std::uint64_t seed, std::size_t repeat, std::size_t fold, Strategy strategy);

// Builds the vocabulary on the training split only, trains the bundle, and
// thresholds its probabilities on the test split.
FitPredict transformer_model(const TransformerSetup& setup, const TrainConfig& train);

nlohmann::ordered_json report_to_json(const std::vector<ModelReport>& reports, const FoldPlan& plan);
// Model-level table: one row per model, mean and std per metric.
std::string model_level_csv(const std::vector<ModelReport>& reports);
// Label-level table: one row per (model, label).
std::string label_level_csv(const std::vector<ModelReport>& reports);
// repeat,fold,epoch,strategy,label,loss
std::string loss_log_csv(const std::vector<ModelReport>& reports);

}  // namespace phenotyper
