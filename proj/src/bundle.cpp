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

#include "phenotyper/bundle.hpp"

#include "phenotyper/error.hpp"

namespace phenotyper {

std::string_view strategy_name(Strategy strategy) {
  return strategy == Strategy::kBinaryRelevance ? "binary_relevance" : "multi_label";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "binary_relevance") return Strategy::kBinaryRelevance;
  if (name == "multi_label") return Strategy::kMultiLabel;
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected binary_relevance or multi_label)");
}

double sigmoid(double logit) {
  if (logit >= 0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

Probabilities sigmoid(const std::array<double, kNumLabels>& logits) {
  Probabilities p{};
  for (std::size_t l = 0; l < kNumLabels; ++l) p[l] = sigmoid(logits[l]);
  return p;
}

LabelSet threshold(const Probabilities& probabilities, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error("threshold: tau must lie in [0, 1]");
  LabelSet out;
  for (Label l : kAllLabels) {
    const double p = probabilities[index_of(l)];
    if (!(p >= 0.0 && p <= 1.0)) throw Error("threshold: probability outside [0, 1]");
    if (p >= tau) out.insert(l);
  }
  return out;
}

std::vector<BinaryRow> binary_relevance_transform(const Corpus& corpus, Label label) {
  std::vector<BinaryRow> rows;
  rows.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    rows.push_back({i, static_cast<std::uint8_t>(corpus[i].gold.contains(label) ? 1 : 0)});
  }
  return rows;
}

namespace detail {

nlohmann::json encoder_config_to_json(const EncoderConfig& config) {
  return {{"num_layers", config.num_layers}, {"hidden", config.hidden},
          {"heads", config.heads},           {"ffn", config.ffn},
          {"max_positions", config.max_positions}, {"vocab_size", config.vocab_size},
          {"seed", config.seed}};
}

EncoderConfig encoder_config_from_json(const nlohmann::json& j) {
  EncoderConfig config;
  auto read = [&j](const char* field, auto& target) {
    if (!j.contains(field)) return;
    try {
      j.at(field).get_to(target);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("encoder config field '") + field + "': wrong type");
    }
  };
  read("num_layers", config.num_layers);
  read("hidden", config.hidden);
  read("heads", config.heads);
  read("ffn", config.ffn);
  read("max_positions", config.max_positions);
  read("vocab_size", config.vocab_size);
  read("seed", config.seed);
  return config;
}

}  // namespace detail
}  // namespace phenotyper
