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

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "phenotyper/error.hpp"
#include "phenotyper/folds.hpp"
#include "phenotyper/synthetic.hpp"

namespace phenotyper {
namespace {

Corpus corpus_of(const std::vector<LabelSet>& golds) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < golds.size(); ++i) docs.push_back({"d" + std::to_string(i), "text", golds[i]});
  return Corpus(std::move(docs));
}

std::size_t positives(const Corpus& c, const std::vector<std::size_t>& positions, Label l) {
  std::size_t n = 0;
  for (auto p : positions) n += c[p].gold.contains(l);
  return n;
}

TEST(StratifiedKFoldTest, DivisibleInstance) {
  std::vector<LabelSet> golds(5, LabelSet{Label::SI});
  golds.resize(10);
  const Corpus c = corpus_of(golds);
  const auto plan = stratified_kfold(c, 5, 1, 3);
  for (std::size_t f = 0; f < 5; ++f) {
    const auto test = plan.test_positions(0, f);
    ASSERT_EQ(test.size(), 2u);
    EXPECT_EQ(positives(c, test, Label::SI), 1u);
  }
}

TEST(StratifiedKFoldTest, TwoFoldsTwoLabels) {
  const Corpus c = corpus_of({{Label::SI}, {Label::SI}, {Label::SA}, {Label::SA}});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto plan = stratified_kfold(c, 2, 1, seed);
    for (std::size_t f = 0; f < 2; ++f) {
      const auto test = plan.test_positions(0, f);
      EXPECT_EQ(positives(c, test, Label::SI), 1u);
      EXPECT_EQ(positives(c, test, Label::SA), 1u);
    }
  }
}

TEST(StratifiedKFoldTest, Preconditions) {
  const Corpus c = corpus_of({{}, {}, {}});
  EXPECT_THROW(stratified_kfold(c, 1, 1, 0), Error);
  EXPECT_THROW(stratified_kfold(c, 4, 1, 0), Error);
  EXPECT_NO_THROW(stratified_kfold(c, 3, 1, 0));
}

TEST(StratifiedKFoldTest, DeterministicAndSeedSensitive) {
  const Corpus c = generate_synthetic(reference_spec());
  const auto a = stratified_kfold(c, 5, 3, 77);
  EXPECT_EQ(a, stratified_kfold(c, 5, 3, 77));
  EXPECT_NE(a.fold_of, stratified_kfold(c, 5, 3, 78).fold_of);
  EXPECT_NE(a.fold_of[0], a.fold_of[1]);
}

TEST(StratifiedKFoldTest, PartitionsOnRandomCorpora) {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<LabelSet> golds;
    for (std::size_t i = 0; i < n; ++i) golds.push_back(LabelSet::from_mask(static_cast<std::uint8_t>(rng.below(16))));
    const Corpus c = corpus_of(golds);
    const std::size_t k = 2 + rng.below(std::min<std::size_t>(n - 1, 9));
    const auto plan = stratified_kfold(c, k, 2, rng.next());
    for (std::size_t r = 0; r < 2; ++r) {
      std::set<std::string> seen;
      std::size_t smallest = n, largest = 0;
      for (std::size_t f = 0; f < k; ++f) {
        const auto ids = plan.test_ids(r, f);
        smallest = std::min(smallest, ids.size());
        largest = std::max(largest, ids.size());
        for (const auto& id : ids) EXPECT_TRUE(seen.insert(id).second) << id;
        EXPECT_EQ(plan.train_positions(r, f).size() + ids.size(), n);
      }
      EXPECT_EQ(seen.size(), n);
      EXPECT_LE(largest - smallest, 1u);
    }
  }
}

double worst_deviation(const Corpus& c, const FoldPlan& plan, Label l) {
  const double global = static_cast<double>(positives(c, [&] {
                          std::vector<std::size_t> all(c.size());
                          for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
                          return all;
                        }(), l)) /
                        static_cast<double>(c.size());
  double worst = 0.0;
  for (std::size_t r = 0; r < plan.repeats; ++r) {
    for (std::size_t f = 0; f < plan.folds; ++f) {
      const auto test = plan.test_positions(r, f);
      const double rate = static_cast<double>(positives(c, test, l)) / static_cast<double>(test.size());
      worst = std::max(worst, std::abs(rate - global));
    }
  }
  return worst;
}

// Plain shuffled K-fold with the same fold sizes.
FoldPlan random_plan(const Corpus& c, std::size_t k, std::uint64_t seed) {
  FoldPlan plan;
  plan.repeats = 1;
  plan.folds = k;
  for (const auto& d : c) plan.ids.push_back(d.id);
  std::vector<std::size_t> order(c.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  plan.fold_of.assign(1, std::vector<std::size_t>(c.size()));
  for (std::size_t i = 0; i < order.size(); ++i) plan.fold_of[0][order[i]] = i % k;
  return plan;
}

TEST(StratifiedKFoldTest, QualityOnReferenceCorpus) {
  const Corpus c = generate_synthetic(reference_spec());
  const auto plan = stratified_kfold(c, 5, 3, 2024);
  for (Label l : kAllLabels) {
    double random_worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) random_worst = std::max(random_worst, worst_deviation(c, random_plan(c, 5, s), l));
    EXPECT_LE(worst_deviation(c, plan, l), random_worst) << label_name(l);
    if (l != Label::ES) {
      EXPECT_LE(worst_deviation(c, plan, l), 0.02) << label_name(l);
    }
  }
  for (std::size_t r = 0; r < 3; ++r) {
    std::size_t folds_with_four = 0;
    for (std::size_t f = 0; f < 5; ++f) folds_with_four += positives(c, plan.test_positions(r, f), Label::ES) >= 4;
    EXPECT_GE(folds_with_four, 4u);
  }
}

}  // namespace
}  // namespace phenotyper
