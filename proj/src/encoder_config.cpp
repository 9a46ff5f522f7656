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

#include "phenotyper/encoder_config.hpp"

#include "phenotyper/error.hpp"

namespace phenotyper {

void EncoderConfig::validate(std::size_t max_len) const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("encoder config field '" + field + "': " + why);
  };
  if (hidden == 0) fail("hidden", "must be positive");
  if (heads == 0) fail("heads", "must be positive");
  if (ffn == 0) fail("ffn", "must be positive");
  if (max_positions == 0) fail("max_positions", "must be positive");
  if (vocab_size == 0) fail("vocab_size", "must be positive");
  if (hidden % heads != 0) fail("heads", "must divide hidden");
  if (max_positions < max_len) {
    fail("max_positions", "must be >= tokenizer max_len " + std::to_string(max_len));
  }
}

ClassifierLayout ClassifierLayout::make(const EncoderConfig& config, std::size_t outputs) {
  ClassifierLayout layout;
  layout.outputs = outputs;
  const auto d = static_cast<Eigen::Index>(config.hidden);
  const auto f = static_cast<Eigen::Index>(config.ffn);

  auto add = [&layout](std::string name, Eigen::Index rows, Eigen::Index cols, TensorInit init) {
    TensorSlot slot;
    slot.name = std::move(name);
    slot.rows = rows;
    slot.cols = cols;
    slot.offset = layout.total;
    slot.init = init;
    slot.decay = init == TensorInit::kTruncatedNormal;
    layout.total += rows * cols;
    layout.slots.push_back(std::move(slot));
    return layout.slots.size() - 1;
  };

  layout.token_embedding =
      add("encoder.token_embedding", static_cast<Eigen::Index>(config.vocab_size), d, TensorInit::kTruncatedNormal);
  layout.position_embedding =
      add("encoder.position_embedding", static_cast<Eigen::Index>(config.max_positions), d, TensorInit::kTruncatedNormal);
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const std::string p = "encoder.layer" + std::to_string(l) + ".";
    LayerSlots s{};
    s.attn_norm_scale = add(p + "attn_norm.scale", 1, d, TensorInit::kOnes);
    s.attn_norm_shift = add(p + "attn_norm.shift", 1, d, TensorInit::kZeros);
    s.query_weight = add(p + "attn.query.weight", d, d, TensorInit::kTruncatedNormal);
    s.query_bias = add(p + "attn.query.bias", 1, d, TensorInit::kZeros);
    s.key_weight = add(p + "attn.key.weight", d, d, TensorInit::kTruncatedNormal);
    s.value_weight = add(p + "attn.value.weight", d, d, TensorInit::kTruncatedNormal);
    s.value_bias = add(p + "attn.value.bias", 1, d, TensorInit::kZeros);
    s.output_weight = add(p + "attn.output.weight", d, d, TensorInit::kTruncatedNormal);
    s.output_bias = add(p + "attn.output.bias", 1, d, TensorInit::kZeros);
    s.ffn_norm_scale = add(p + "ffn_norm.scale", 1, d, TensorInit::kOnes);
    s.ffn_norm_shift = add(p + "ffn_norm.shift", 1, d, TensorInit::kZeros);
    s.ffn_in_weight = add(p + "ffn.in.weight", d, f, TensorInit::kTruncatedNormal);
    s.ffn_in_bias = add(p + "ffn.in.bias", 1, f, TensorInit::kZeros);
    s.ffn_out_weight = add(p + "ffn.out.weight", f, d, TensorInit::kTruncatedNormal);
    s.ffn_out_bias = add(p + "ffn.out.bias", 1, d, TensorInit::kZeros);
    layout.layers.push_back(s);
  }
  layout.final_norm_scale = add("encoder.final_norm.scale", 1, d, TensorInit::kOnes);
  layout.final_norm_shift = add("encoder.final_norm.shift", 1, d, TensorInit::kZeros);
  layout.encoder_size = layout.total;
  layout.head_weight = add("head.weight", static_cast<Eigen::Index>(outputs), d, TensorInit::kTruncatedNormal);
  layout.head_bias = add("head.bias", static_cast<Eigen::Index>(outputs), 1, TensorInit::kZeros);
  return layout;
}

}  // namespace phenotyper
