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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "phenotyper/corpus.hpp"
#include "phenotyper/cross_validation.hpp"
#include "phenotyper/training.hpp"

namespace phenotyper {

// Where the experiment corpus comes from: a corpus file, a synthetic spec
// file, or one of the built-in specs ("reference", "reference_compact").
struct CorpusSource {
  enum class Kind { kFile, kSyntheticSpec, kBuiltin };
  Kind kind = Kind::kBuiltin;
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::kJsonl;
  std::string builtin = "reference";
};

struct ExperimentConfig {
  CorpusSource corpus;
  EncoderConfig encoder;
  std::size_t max_len = kDefaultMaxLen;
  std::size_t min_frequency = 1;
  std::vector<TrainConfig> strategies;
  std::size_t folds = 5;
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
  double threshold = kDefaultThreshold;
  std::filesystem::path output_dir = "runs/default";
};

// Relative paths resolve against `base_dir`. Throws ConfigError naming the field.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
// Accepts an experiment config or a manifest written by run_experiment.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
// Normalized form with absolute paths; what the manifest records.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

Corpus load_experiment_corpus(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

struct RunOptions {
  std::size_t jobs = 1;
  std::optional<Strategy> only;  // restrict to one configured strategy
  RunCallback on_done;
};

struct ExperimentResult {
  Corpus corpus;
  FoldPlan plan;
  std::vector<ModelReport> reports;
};

// Fold-plan seed derived from the master seed.
inline std::uint64_t fold_plan_seed(std::uint64_t seed) { return derive_seed(seed, 0xF01D); }

// Full validation (corpus, encoder, folds) before any training.
void validate_experiment(const ExperimentConfig& config, const Corpus& corpus);

// Runs repeated stratified cross-validation for every configured strategy and
// writes into config.output_dir: metrics.json, model_level.csv,
// label_level.csv, loss_log.csv, folds.json, vocab/ and manifest.json.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// cmd_stats payloads.
nlohmann::ordered_json distribution_to_json(const LabelDistribution& dist);
std::string format_distribution(const LabelDistribution& dist);

}  // namespace phenotyper
