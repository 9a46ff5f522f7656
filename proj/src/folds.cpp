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

#include "phenotyper/folds.hpp"

#include "phenotyper/error.hpp"

namespace phenotyper {

std::vector<std::size_t> FoldPlan::test_positions(std::size_t repeat, std::size_t fold) const {
  std::vector<std::size_t> out;
  const auto& assignment = fold_of.at(repeat);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_positions(std::size_t repeat, std::size_t fold) const {
  std::vector<std::size_t> out;
  const auto& assignment = fold_of.at(repeat);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::string> FoldPlan::test_ids(std::size_t repeat, std::size_t fold) const {
  std::vector<std::string> out;
  for (std::size_t i : test_positions(repeat, fold)) out.push_back(ids[i]);
  return out;
}

std::vector<std::size_t> iterative_stratification(std::span<const LabelSet> golds, std::size_t folds,
                                                  Rng& rng) {
  const std::size_t n = golds.size();
  if (folds < 2) throw Error("stratified k-fold: K must be at least 2");
  if (folds > n) {
    throw Error("stratified k-fold: K=" + std::to_string(folds) + " exceeds corpus size " + std::to_string(n));
  }

  std::vector<std::size_t> capacity(folds);
  for (std::size_t j = 0; j < folds; ++j) capacity[j] = n / folds + (j < n % folds ? 1 : 0);

  std::array<std::size_t, kNumLabels> remaining{};
  for (const auto& g : golds) {
    for (Label l : kAllLabels) remaining[index_of(l)] += g.contains(l) ? 1 : 0;
  }
  std::vector<std::array<double, kNumLabels>> demand(folds);
  for (std::size_t j = 0; j < folds; ++j) {
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      demand[j][l] = static_cast<double>(remaining[l]) * static_cast<double>(capacity[j]) / static_cast<double>(n);
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));

  constexpr std::size_t kUnplaced = static_cast<std::size_t>(-1);
  std::vector<std::size_t> fold_of(n, kUnplaced);
  std::vector<std::size_t> tied;

  for (;;) {
    std::size_t label = kNumLabels;
    for (std::size_t l = 0; l < kNumLabels; ++l) {
      if (remaining[l] > 0 && (label == kNumLabels || remaining[l] < remaining[label])) label = l;
    }
    if (label == kNumLabels) break;

    for (std::size_t i : order) {
      if (fold_of[i] != kUnplaced || !golds[i].contains(kAllLabels[label])) continue;
      tied.clear();
      for (std::size_t j = 0; j < folds; ++j) {
        if (capacity[j] == 0) continue;
        if (tied.empty()) {
          tied.push_back(j);
          continue;
        }
        const std::size_t best = tied.front();
        if (demand[j][label] > demand[best][label] ||
            (demand[j][label] == demand[best][label] && capacity[j] > capacity[best])) {
          tied.assign(1, j);
        } else if (demand[j][label] == demand[best][label] && capacity[j] == capacity[best]) {
          tied.push_back(j);
        }
      }
      const std::size_t j = tied.size() == 1 ? tied.front() : tied[rng.below(tied.size())];
      fold_of[i] = j;
      --capacity[j];
      for (Label l : kAllLabels) {
        if (!golds[i].contains(l)) continue;
        demand[j][index_of(l)] -= 1.0;
        --remaining[index_of(l)];
      }
    }
  }

  for (std::size_t i : order) {
    if (fold_of[i] != kUnplaced) continue;
    std::size_t best = 0;
    for (std::size_t j = 1; j < folds; ++j) {
      if (capacity[j] > capacity[best]) best = j;
    }
    fold_of[i] = best;
    --capacity[best];
  }
  return fold_of;
}

FoldPlan stratified_kfold(const Corpus& corpus, std::size_t folds, std::size_t repeats, std::uint64_t seed) {
  if (folds < 2) throw Error("stratified k-fold: K must be at least 2");
  if (folds > corpus.size()) {
    throw Error("stratified k-fold: K=" + std::to_string(folds) + " exceeds corpus size " +
                std::to_string(corpus.size()));
  }
  FoldPlan plan;
  plan.repeats = repeats;
  plan.folds = folds;
  plan.seed = seed;
  std::vector<LabelSet> golds;
  for (const auto& doc : corpus) {
    plan.ids.push_back(doc.id);
    golds.push_back(doc.gold);
  }
  for (std::size_t r = 0; r < repeats; ++r) {
    Rng rng(repeat_seed(seed, r));
    plan.fold_of.push_back(iterative_stratification(golds, folds, rng));
  }
  return plan;
}

}  // namespace phenotyper
