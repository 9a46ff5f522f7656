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
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "phenotyper/labels.hpp"

namespace phenotyper {

struct Document {
  std::string id;
  std::string text;
  LabelSet gold;

  bool operator==(const Document&) const = default;
};

enum class CorpusFormat { kJsonl, kCsv };

CorpusFormat parse_corpus_format(const std::string& name);
// Picks the format from the file extension (".csv" -> csv, anything else -> jsonl).
CorpusFormat format_for_path(const std::filesystem::path& path);

// Ordered collection of documents with unique ids and non-empty text.
class Corpus {
 public:
  Corpus() = default;
  // Validates id uniqueness and non-empty text.
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

  // Documents at the given positions, in the given order.
  Corpus subset(const std::vector<std::size_t>& positions) const;

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<Document> documents_;
};

Corpus read_corpus(std::istream& in, CorpusFormat format, const std::string& source_name = "<stream>");
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus load_corpus(const std::filesystem::path& path);

void write_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus, CorpusFormat format);

// Unordered label pairs in (SI,SA), (SI,ES), (SI,NSSI), (SA,ES), (SA,NSSI),
// (ES,NSSI) order.
inline constexpr std::size_t kNumLabelPairs = 6;
std::array<std::pair<Label, Label>, kNumLabelPairs> label_pairs();

struct LabelDistribution {
  std::size_t documents = 0;
  std::array<std::size_t, kNumLabels> per_label_counts{};
  std::array<std::size_t, kNumLabels + 1> cardinality_histogram{};
  std::array<std::size_t, kNumLabels> single_label_breakdown{};
  std::array<std::size_t, kNumLabelPairs> pair_cooccurrence{};
  std::size_t total_label_instances = 0;

  std::size_t pair_count(Label a, Label b) const;
  bool operator==(const LabelDistribution&) const = default;
};

LabelDistribution label_distribution(const Corpus& corpus);

}  // namespace phenotyper
