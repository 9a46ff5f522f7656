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

#include "phenotyper/training.hpp"

namespace phenotyper {

TrainConfig TrainConfig::defaults(Strategy strategy) {
  TrainConfig c;
  c.strategy = strategy;
  c.weight_decay = 0.01;
  if (strategy == Strategy::kBinaryRelevance) {
    c.learning_rate = 1e-5;
    c.batch_size = 4;
    c.epochs = 5;
  } else {
    c.learning_rate = 2e-5;
    c.batch_size = 8;
    c.epochs = 20;
  }
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("train config field 'learning_rate': must be positive");
  }
  if (batch_size == 0) throw ConfigError("train config field 'batch_size': must be positive");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("train config field 'weight_decay': must be non-negative");
  }
}

TrainConfig train_config_from_json(const nlohmann::json& j, Strategy fallback) {
  if (!j.is_object()) throw ConfigError("train config: expected a JSON object");
  Strategy strategy = fallback;
  if (j.contains("strategy")) {
    if (!j["strategy"].is_string()) throw ConfigError("train config field 'strategy': expected a string");
    strategy = parse_strategy(j["strategy"].get<std::string>());
  }
  TrainConfig c = TrainConfig::defaults(strategy);
  auto read = [&j](const char* field, auto& target) {
    if (!j.contains(field)) return;
    try {
      j.at(field).get_to(target);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("train config field '") + field + "': wrong type");
    }
  };
  read("learning_rate", c.learning_rate);
  read("batch_size", c.batch_size);
  read("epochs", c.epochs);
  read("weight_decay", c.weight_decay);
  read("seed", c.seed);
  read("shuffle", c.shuffle);
  c.validate();
  return c;
}

TrainConfig parse_train_config(const std::string& json_text, Strategy fallback) {
  const auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("train config is not valid JSON");
  return train_config_from_json(j, fallback);
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"strategy", std::string(strategy_name(c.strategy))},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"weight_decay", c.weight_decay},
          {"seed", c.seed},
          {"shuffle", c.shuffle}};
}

BceResult bce_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets) {
  if (logits.rows() != targets.rows() || logits.cols() != targets.cols()) {
    throw Error("bce_loss: logits and targets differ in shape");
  }
  BceResult r;
  r.grad.resize(logits.rows(), logits.cols());
  const double n = static_cast<double>(logits.size());
  if (n == 0) return r;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    for (Eigen::Index k = 0; k < logits.cols(); ++k) {
      r.loss += bce_term(logits(i, k), targets(i, k));
      r.grad(i, k) = (sigmoid(logits(i, k)) - targets(i, k)) / n;
    }
  }
  r.loss /= n;
  return r;
}

}  // namespace phenotyper
