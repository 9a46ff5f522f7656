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

#include "phenotyper/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "phenotyper/error.hpp"

namespace phenotyper {
namespace {

const char* const kReserved[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current += static_cast<char>(std::tolower(c));
      continue;
    }
    if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
    if (!std::isspace(c) && std::isprint(c)) out.emplace_back(1, ch);
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

Vocabulary::Vocabulary() {
  for (const char* t : kReserved) add(t);
}

void Vocabulary::add(std::string token) {
  ids_.emplace(token, static_cast<TokenId>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(const Corpus& corpus, std::size_t min_frequency) {
  if (corpus.empty()) throw Error("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus) {
    for (auto& w : split_words(doc.text)) ++counts[std::move(w)];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [token, n] : counts) {
    if (n >= min_frequency) kept.emplace_back(token, n);
  }
  // Most frequent first, ties alphabetical (the map already iterates sorted).
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary vocab;
  vocab.min_frequency_ = min_frequency;
  for (auto& [token, n] : kept) vocab.add(std::move(token));
  return vocab;
}

TokenId Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.count(std::string(token)) > 0; }

std::string Vocabulary::to_json() const {
  nlohmann::ordered_json j;
  j["min_frequency"] = min_frequency_;
  nlohmann::ordered_json map = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < tokens_.size(); ++i) map[tokens_[i]] = i;
  j["tokens"] = std::move(map);
  return j.dump() + "\n";
}

Vocabulary Vocabulary::from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("tokens") || !j["tokens"].is_object()) {
    throw ConfigError("vocabulary file: expected {\"tokens\": {token: id}}");
  }
  std::vector<std::string> by_id(j["tokens"].size());
  std::vector<bool> filled(by_id.size(), false);
  for (const auto& [token, id] : j["tokens"].items()) {
    if (!id.is_number_unsigned() || id.get<std::size_t>() >= by_id.size() || filled[id.get<std::size_t>()]) {
      throw ConfigError("vocabulary file: ids must be dense and unique, bad entry '" + token + "'");
    }
    by_id[id.get<std::size_t>()] = token;
    filled[id.get<std::size_t>()] = true;
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (by_id.size() <= i || by_id[i] != kReserved[i]) {
      throw ConfigError(std::string("vocabulary file: reserved id ") + std::to_string(i) + " must be " +
                        kReserved[i]);
    }
  }
  Vocabulary vocab;
  vocab.min_frequency_ = j.value("min_frequency", std::size_t{1});
  for (std::size_t i = 4; i < by_id.size(); ++i) vocab.add(by_id[i]);
  return vocab;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocabulary file " + path.string());
  out << to_json();
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocabulary file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

Vocabulary build_vocab(const Corpus& corpus, std::size_t min_frequency) {
  return Vocabulary::build(corpus, min_frequency);
}

std::size_t TokenSequence::valid_length() const {
  return static_cast<std::size_t>(std::find(mask.begin(), mask.end(), 0) - mask.begin());
}

TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_len, bool pad) {
  if (max_len < 2) throw Error("tokenize: max_len must be at least 2");
  const auto words = split_words(text);
  const std::size_t body = std::min(words.size(), max_len - 2);

  TokenSequence seq;
  seq.truncated = body < words.size();
  seq.ids.reserve(pad ? max_len : body + 2);
  seq.ids.push_back(kClsId);
  for (std::size_t i = 0; i < body; ++i) seq.ids.push_back(vocab.id(words[i]));
  seq.ids.push_back(kSepId);
  seq.mask.assign(seq.ids.size(), 1);
  if (pad) {
    seq.ids.resize(max_len, kPadId);
    seq.mask.resize(max_len, 0);
  }
  return seq;
}

}  // namespace phenotyper
