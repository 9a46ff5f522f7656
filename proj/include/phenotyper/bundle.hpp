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
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phenotyper/classifier.hpp"
#include "phenotyper/corpus.hpp"
#include "phenotyper/labels.hpp"

namespace phenotyper {

enum class Strategy { kBinaryRelevance, kMultiLabel };

std::string_view strategy_name(Strategy strategy);
Strategy parse_strategy(std::string_view name);

inline constexpr double kDefaultThreshold = 0.5;

using Probabilities = std::array<double, kNumLabels>;

// Numerically stable logistic function.
double sigmoid(double logit);
Probabilities sigmoid(const std::array<double, kNumLabels>& logits);

// Label included iff its probability is >= tau. tau must lie in [0, 1].
LabelSet threshold(const Probabilities& probabilities, double tau = kDefaultThreshold);

// One row per document, in corpus order; target is 1 iff `label` is gold.
struct BinaryRow {
  std::size_t document = 0;
  std::uint8_t target = 0;
};
std::vector<BinaryRow> binary_relevance_transform(const Corpus& corpus, Label label);

// Seed of the encoder for binary-relevance classifier `label`.
inline std::uint64_t label_seed(std::uint64_t seed, Label label) {
  return derive_seed(seed, 0x4C00 + index_of(label));
}

// Trained classifiers under one strategy: four single-logit classifiers in
// label order (binary relevance) or one four-logit classifier (multi-label).
template <typename Scalar>
struct ModelBundle {
  Strategy strategy = Strategy::kMultiLabel;
  EncoderConfig config;
  std::vector<TextClassifier<Scalar>> classifiers;

  static ModelBundle initialize(Strategy strategy, const EncoderConfig& config) {
    ModelBundle bundle;
    bundle.strategy = strategy;
    bundle.config = config;
    if (strategy == Strategy::kMultiLabel) {
      bundle.classifiers.emplace_back(config, kNumLabels);
    } else {
      for (Label l : kAllLabels) {
        EncoderConfig per_label = config;
        per_label.seed = label_seed(config.seed, l);
        bundle.classifiers.emplace_back(per_label, 1);
      }
    }
    return bundle;
  }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& c : classifiers) n += c.layout().total;
    return n;
  }

  Eigen::Index encoder_parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& c : classifiers) n += c.encoder_parameter_count();
    return n;
  }

  // Bitwise parameter equality.
  bool operator==(const ModelBundle& other) const {
    if (strategy != other.strategy || !(config == other.config) ||
        classifiers.size() != other.classifiers.size()) {
      return false;
    }
    for (std::size_t i = 0; i < classifiers.size(); ++i) {
      const auto& a = classifiers[i].parameters();
      const auto& b = other.classifiers[i].parameters();
      if (a.size() != b.size() ||
          std::memcmp(a.data(), b.data(), sizeof(Scalar) * static_cast<std::size_t>(a.size())) != 0) {
        return false;
      }
    }
    return true;
  }
};

template <typename Scalar>
std::array<double, kNumLabels> bundle_logits(const ModelBundle<Scalar>& bundle, const TokenSequence& seq) {
  std::array<double, kNumLabels> logits{};
  if (bundle.strategy == Strategy::kMultiLabel) {
    const auto z = bundle.classifiers.at(0).logits(seq);
    for (std::size_t l = 0; l < kNumLabels; ++l) logits[l] = static_cast<double>(z(static_cast<Eigen::Index>(l)));
  } else {
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      logits[l] = static_cast<double>(bundle.classifiers.at(l).logits(seq)(0));
    }
  }
  return logits;
}

// Independent per-label sigmoid probabilities; they need not sum to one.
template <typename Scalar>
Probabilities predict(const ModelBundle<Scalar>& bundle, const TokenSequence& seq) {
  return sigmoid(bundle_logits(bundle, seq));
}

namespace detail {

inline constexpr char kCheckpointMagic[8] = {'P', 'H', 'E', 'N', 'O', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

nlohmann::json encoder_config_to_json(const EncoderConfig& config);
EncoderConfig encoder_config_from_json(const nlohmann::json& j);

}  // namespace detail

// Versioned binary checkpoint: magic, version, scalar width, a JSON header
// with strategy and encoder config, then each classifier's flat parameter
// vector as raw host-order scalars. Reload is bit-exact.
template <typename Scalar>
void save_bundle(const std::filesystem::path& path, const ModelBundle<Scalar>& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  nlohmann::json header;
  header["strategy"] = std::string(strategy_name(bundle.strategy));
  header["config"] = detail::encoder_config_to_json(bundle.config);
  header["classifiers"] = nlohmann::json::array();
  for (const auto& c : bundle.classifiers) {
    header["classifiers"].push_back(
        {{"seed", c.config().seed}, {"outputs", c.outputs()}, {"parameters", c.parameters().size()}});
  }
  const std::string text = header.dump();
  const std::uint32_t version = detail::kCheckpointVersion;
  const auto scalar_bytes = static_cast<std::uint32_t>(sizeof(Scalar));
  const auto header_bytes = static_cast<std::uint64_t>(text.size());
  out.write(detail::kCheckpointMagic, sizeof(detail::kCheckpointMagic));
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&scalar_bytes), sizeof(scalar_bytes));
  out.write(reinterpret_cast<const char*>(&header_bytes), sizeof(header_bytes));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& c : bundle.classifiers) {
    out.write(reinterpret_cast<const char*>(c.parameters().data()),
              static_cast<std::streamsize>(sizeof(Scalar) * static_cast<std::size_t>(c.parameters().size())));
  }
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

template <typename Scalar>
ModelBundle<Scalar> load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  char magic[sizeof(detail::kCheckpointMagic)];
  std::uint32_t version = 0;
  std::uint32_t scalar_bytes = 0;
  std::uint64_t header_bytes = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&scalar_bytes), sizeof(scalar_bytes));
  in.read(reinterpret_cast<char*>(&header_bytes), sizeof(header_bytes));
  if (!in || std::memcmp(magic, detail::kCheckpointMagic, sizeof(magic)) != 0) {
    throw Error(path.string() + ": not a checkpoint file");
  }
  if (version != detail::kCheckpointVersion) {
    throw Error(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  if (scalar_bytes != sizeof(Scalar)) {
    throw Error(path.string() + ": checkpoint stores " + std::to_string(scalar_bytes) +
                "-byte scalars, expected " + std::to_string(sizeof(Scalar)));
  }
  std::string text(header_bytes, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_bytes));
  const auto header = nlohmann::json::parse(text, nullptr, false);
  if (!in || header.is_discarded()) throw Error(path.string() + ": corrupt checkpoint header");

  ModelBundle<Scalar> bundle;
  bundle.strategy = parse_strategy(header.at("strategy").get<std::string>());
  bundle.config = detail::encoder_config_from_json(header.at("config"));
  for (const auto& entry : header.at("classifiers")) {
    EncoderConfig config = bundle.config;
    config.seed = entry.at("seed").get<std::uint64_t>();
    TextClassifier<Scalar> c(config, entry.at("outputs").get<std::size_t>());
    if (c.parameters().size() != entry.at("parameters").get<Eigen::Index>()) {
      throw Error(path.string() + ": parameter count does not match the encoder config");
    }
    in.read(reinterpret_cast<char*>(c.parameters().data()),
            static_cast<std::streamsize>(sizeof(Scalar) * static_cast<std::size_t>(c.parameters().size())));
    bundle.classifiers.push_back(std::move(c));
  }
  if (!in) throw Error(path.string() + ": truncated checkpoint");
  return bundle;
}

}  // namespace phenotyper
