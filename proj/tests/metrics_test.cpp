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

#include <gtest/gtest.h>

#include "phenotyper/error.hpp"
#include "phenotyper/metrics.hpp"
#include "phenotyper/rng.hpp"
#include "phenotyper/synthetic.hpp"

namespace phenotyper {
namespace {

std::vector<DocumentLabels> docs(const std::vector<LabelSet>& sets) {
  std::vector<DocumentLabels> out;
  for (std::size_t i = 0; i < sets.size(); ++i) out.push_back({"d" + std::to_string(i), sets[i]});
  return out;
}

TEST(LabelMetricsTest, HandCount) {
  const auto gold = docs({{Label::SI}, {Label::SI}, {}});
  const auto pred = docs({{Label::SI}, {}, {}});
  const auto m = label_metrics(pred, gold, Label::SI);
  EXPECT_DOUBLE_EQ(m.precision, 1.0);
  EXPECT_DOUBLE_EQ(m.recall, 0.5);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.accuracy, 2.0 / 3.0);
}

TEST(LabelMetricsTest, ZeroDenominatorsGiveZero) {
  const auto gold = docs({{Label::ES}, {}});
  const auto pred = docs({{}, {}});
  const auto m = label_metrics(pred, gold, Label::ES);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_EQ(m.accuracy, 0.5);
  EXPECT_EQ(metrics_from_counts({}).accuracy, 0.0);
}

TEST(LabelMetricsTest, PerfectPrediction) {
  const auto gold = docs({{Label::NSSI}, {}, {Label::NSSI, Label::SI}});
  const auto m = label_metrics(gold, gold, Label::NSSI);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);
}

TEST(MicroMetricsTest, HandCount) {
  const auto gold = docs({{Label::SI, Label::SA}, {Label::SI}, {}});
  const auto pred = docs({{Label::SI}, {Label::SI, Label::NSSI}, {}});
  const auto counts = confusion_counts(pred, gold);
  ConfusionCounts sum;
  for (const auto& c : counts) sum += c;
  EXPECT_EQ(sum.tp, 2u);
  EXPECT_EQ(sum.fp, 1u);
  EXPECT_EQ(sum.fn, 1u);
  const auto m = micro_metrics(pred, gold);
  EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.overall_accuracy, 10.0 / 12.0);
  EXPECT_DOUBLE_EQ(m.subset_accuracy, 1.0 / 3.0);
}

TEST(MicroMetricsTest, AllEmptyOnReferenceCorpus) {
  std::vector<DocumentLabels> gold, pred;
  for (const auto& d : generate_synthetic(reference_spec())) {
    gold.push_back({d.id, d.gold});
    pred.push_back({d.id, {}});
  }
  const auto m = micro_metrics(pred, gold);
  EXPECT_DOUBLE_EQ(m.overall_accuracy, 1.0 - 675.0 / 2000.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_DOUBLE_EQ(micro_metrics(gold, gold).f1, 1.0);
  EXPECT_DOUBLE_EQ(micro_metrics(gold, gold).overall_accuracy, 1.0);
}

TEST(MicroMetricsTest, MisalignedRejected) {
  auto a = docs({{}, {}});
  auto b = docs({{}, {}});
  b[1].id = "other";
  EXPECT_THROW(micro_metrics(a, b), Error);
  EXPECT_THROW(label_metrics(a, docs({{}}), Label::SI), Error);
}

TEST(MicroMetricsTest, BruteForceOracle) {
  Rng rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<LabelSet> g, p;
    for (std::size_t i = 0; i < n; ++i) {
      g.push_back(LabelSet::from_mask(static_cast<std::uint8_t>(rng.below(16))));
      p.push_back(LabelSet::from_mask(static_cast<std::uint8_t>(rng.below(16))));
    }
    long tp = 0, fp = 0, fn = 0, correct = 0, exact = 0;
    for (std::size_t i = 0; i < n; ++i) {
      exact += g[i] == p[i];
      for (int bit = 0; bit < 4; ++bit) {
        const bool gb = (g[i].mask() >> bit) & 1, pb = (p[i].mask() >> bit) & 1;
        tp += gb && pb;
        fp += !gb && pb;
        fn += gb && !pb;
        correct += gb == pb;
      }
    }
    const auto m = micro_metrics(docs(p), docs(g));
    const double P = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double R = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    const double F = 2 * tp + fp + fn ? 2.0 * double(tp) / double(2 * tp + fp + fn) : 0.0;
    EXPECT_NEAR(m.precision, P, 1e-12);
    EXPECT_NEAR(m.recall, R, 1e-12);
    EXPECT_NEAR(m.f1, F, 1e-12);
    EXPECT_NEAR(m.overall_accuracy, double(correct) / double(4 * n), 1e-12);
    EXPECT_NEAR(m.subset_accuracy, double(exact) / double(n), 1e-12);
    if (P > 0 && R > 0) {
      EXPECT_NEAR(m.f1, 2 * P * R / (P + R), 1e-12);
    }
    for (int bit = 0; bit < 4; ++bit) {
      long ltp = 0, lfp = 0, lfn = 0, ltn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool gb = (g[i].mask() >> bit) & 1, pb = (p[i].mask() >> bit) & 1;
        ltp += gb && pb;
        lfp += !gb && pb;
        lfn += gb && !pb;
        ltn += !gb && !pb;
      }
      const auto lm = label_metrics(docs(p), docs(g), kAllLabels[static_cast<std::size_t>(bit)]);
      EXPECT_NEAR(lm.accuracy, double(ltp + ltn) / double(n), 1e-12);
      EXPECT_NEAR(lm.precision, ltp + lfp ? double(ltp) / double(ltp + lfp) : 0.0, 1e-12);
      EXPECT_NEAR(lm.recall, ltp + lfn ? double(ltp) / double(ltp + lfn) : 0.0, 1e-12);
      EXPECT_NEAR(lm.f1, 2 * ltp + lfp + lfn ? 2.0 * double(ltp) / double(2 * ltp + lfp + lfn) : 0.0, 1e-12);
      EXPECT_EQ(ltp + lfp + lfn + ltn, static_cast<long>(n));
    }
  }
}

}  // namespace
}  // namespace phenotyper
