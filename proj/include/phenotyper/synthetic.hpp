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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phenotyper/corpus.hpp"
#include "phenotyper/labels.hpp"

namespace phenotyper {

struct CompositionEntry {
  LabelSet labels;
  std::size_t count = 0;

  bool operator==(const CompositionEntry&) const = default;
};

// Label-conditioned trigger phrases plus label-free filler.
//
// A trigger sentence is `<lead-in> <phrase> [and <phrase>...].`; every other
// sentence is drawn verbatim from `distractors`. Trigger phrases are matched
// literally, so no phrase may occur inside any other bank entry.
struct PhraseBank {
  std::array<std::vector<std::string>, kNumLabels> triggers;
  std::vector<std::string> lead_ins;
  std::vector<std::string> distractors;

  bool operator==(const PhraseBank&) const = default;
};

struct SyntheticSpec {
  std::size_t corpus_size = 0;
  std::vector<CompositionEntry> composition;
  PhraseBank phrases;
  std::size_t min_sentences = 1;
  std::size_t max_sentences = 1;
  // Trigger sentences are placed among the first `trigger_window` sentences.
  std::size_t trigger_window = 1;
  // Chance of a second, different phrase for a gold label.
  double extra_phrase_probability = 0.0;
  std::string id_prefix = "note";
  std::uint64_t seed = 0;

  bool operator==(const SyntheticSpec&) const = default;
};

// Throws ConfigError naming the offending field.
void validate(const SyntheticSpec& spec);

SyntheticSpec parse_synthetic_spec(const std::string& json_text);
std::string dump_synthetic_spec(const SyntheticSpec& spec);
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

// Composition solved from the published aggregates of the 500-note cohort:
// 294 SI, 265 SA, 22 ES, 94 NSSI; 103 unlabeled; 172 single-label
// (96/62/3/11); 176 two-label; 45 three-label; 4 four-label; SI and SA
// together in 178 notes. Texts are long enough that roughly one note in seven
// exceeds 512 tokens.
SyntheticSpec reference_spec();

// Same composition, phrase bank and seed with 2-5 sentences per note, for
// desk-scale cross-validation runs.
SyntheticSpec reference_compact_spec();

// Pure function of `spec`: equal specs give byte-identical corpora.
Corpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace phenotyper
