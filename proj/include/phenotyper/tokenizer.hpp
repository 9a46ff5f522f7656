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
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "phenotyper/corpus.hpp"

namespace phenotyper {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;
inline constexpr TokenId kClsId = 2;
inline constexpr TokenId kSepId = 3;
inline constexpr std::size_t kDefaultMaxLen = 512;

// Lowercased word-level split: runs of letters, digits and non-ASCII bytes
// form one token, every other printable character is a token on its own, and
// whitespace separates.
std::vector<std::string> split_words(std::string_view text);

class Vocabulary {
 public:
  // Reserved tokens only.
  Vocabulary();

  static Vocabulary build(const Corpus& corpus, std::size_t min_frequency);

  std::size_t size() const { return tokens_.size(); }
  std::size_t min_frequency() const { return min_frequency_; }
  TokenId id(std::string_view token) const;  // kUnkId when absent
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }

  std::string to_json() const;
  static Vocabulary from_json(const std::string& json_text);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  std::size_t min_frequency_ = 1;
};

Vocabulary build_vocab(const Corpus& corpus, std::size_t min_frequency);

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> mask;
  bool truncated = false;

  std::size_t size() const { return ids.size(); }
  // Number of leading real tokens; the mask is a prefix of ones.
  std::size_t valid_length() const;

  bool operator==(const TokenSequence&) const = default;
};

// [CLS] body [SEP], keeping the first max_len - 2 body tokens. With `pad`
// the result is filled with [PAD] up to exactly max_len.
TokenSequence tokenize(std::string_view text, const Vocabulary& vocab,
                       std::size_t max_len = kDefaultMaxLen, bool pad = false);

}  // namespace phenotyper
