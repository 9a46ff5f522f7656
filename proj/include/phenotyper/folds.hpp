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
#include <span>
#include <string>
#include <vector>

#include "phenotyper/corpus.hpp"
#include "phenotyper/labels.hpp"
#include "phenotyper/rng.hpp"

namespace phenotyper {

// Repeated K-fold plan. fold_of[r][i] is the test fold of document i (corpus
// order) in repeat r; within a repeat the K test sets partition the corpus.
struct FoldPlan {
  std::size_t repeats = 0;
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> ids;
  std::vector<std::vector<std::size_t>> fold_of;

  std::vector<std::size_t> test_positions(std::size_t repeat, std::size_t fold) const;
  std::vector<std::size_t> train_positions(std::size_t repeat, std::size_t fold) const;
  std::vector<std::string> test_ids(std::size_t repeat, std::size_t fold) const;

  bool operator==(const FoldPlan&) const = default;
};

inline std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat) {
  return derive_seed(seed, 0x5200 + repeat);
}

// Iterative stratification for one repeat. Labels are taken rarest first (by
// positives not yet placed, ties in label order); each unplaced document
// carrying the current label, in a seeded random order, goes to the fold with
// the largest remaining demand for that label, ties to the largest remaining
// capacity, then uniformly at random. Folds with no capacity left are
// skipped, so fold sizes differ by at most one. Label-free documents then go
// to the fold with the most remaining capacity (lowest index on ties).
std::vector<std::size_t> iterative_stratification(std::span<const LabelSet> golds, std::size_t folds,
                                                  Rng& rng);

// Throws when folds < 2 or folds > corpus size.
FoldPlan stratified_kfold(const Corpus& corpus, std::size_t folds = 5, std::size_t repeats = 3,
                          std::uint64_t seed = 0);

}  // namespace phenotyper
