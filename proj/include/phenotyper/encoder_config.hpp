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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace phenotyper {

struct EncoderConfig {
  std::size_t num_layers = 2;
  std::size_t hidden = 64;
  std::size_t heads = 4;
  std::size_t ffn = 256;
  std::size_t max_positions = 512;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 0;

  // Throws ConfigError. `max_len` is the tokenizer cap the encoder must fit.
  void validate(std::size_t max_len = 0) const;

  bool operator==(const EncoderConfig&) const = default;
};

enum class TensorInit { kTruncatedNormal, kZeros, kOnes };

// One named tensor inside a flat parameter vector.
struct TensorSlot {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;
  TensorInit init = TensorInit::kZeros;
  bool decay = false;  // subject to decoupled weight decay

  Eigen::Index size() const { return rows * cols; }
};

struct LayerSlots {
  std::size_t attn_norm_scale, attn_norm_shift;
  std::size_t query_weight, query_bias;
  // No key bias: it shifts every score of a query row by the same amount,
  // which softmax cancels, so its gradient is identically zero.
  std::size_t key_weight;
  std::size_t value_weight, value_bias;
  std::size_t output_weight, output_bias;
  std::size_t ffn_norm_scale, ffn_norm_shift;
  std::size_t ffn_in_weight, ffn_in_bias;
  std::size_t ffn_out_weight, ffn_out_bias;
};

// Placement of every encoder and head tensor in one flat vector. Encoder
// tensors come first, so the head occupies the tail [encoder_size, total).
struct ClassifierLayout {
  std::vector<TensorSlot> slots;
  std::size_t token_embedding = 0;
  std::size_t position_embedding = 0;
  std::vector<LayerSlots> layers;
  std::size_t final_norm_scale = 0;
  std::size_t final_norm_shift = 0;
  std::size_t head_weight = 0;  // outputs x hidden
  std::size_t head_bias = 0;    // outputs x 1
  Eigen::Index encoder_size = 0;
  Eigen::Index total = 0;
  std::size_t outputs = 0;

  static ClassifierLayout make(const EncoderConfig& config, std::size_t outputs);
};

}  // namespace phenotyper
