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

#include "phenotyper/gradcheck.hpp"

namespace phenotyper {
namespace {

EncoderConfig probe(std::size_t layers) {
  const ProbeBatch batch = probe_batch();
  EncoderConfig c = probe_config(batch.vocab.size());
  c.num_layers = layers;
  return c;
}

TEST(RelativeErrorTest, Definition) {
  EXPECT_EQ(relative_error(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(2.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(relative_error(0.0, 1e-10), 1e-2);
  EXPECT_EQ(relative_error(0.0, 0.0), 0.0);
}

TEST(GradCheckTest, ProbeEncoderBothStrategies) {
  const ProbeBatch batch = probe_batch();
  for (Strategy s : {Strategy::kMultiLabel, Strategy::kBinaryRelevance}) {
    const auto report = grad_check(s, probe(1), batch.sequences, batch.golds);
    EXPECT_LT(report.max_relative_error, 1e-4) << strategy_name(s);
    EXPECT_GT(report.coordinates, 1000u);
    for (const auto& t : report.tensors) EXPECT_LT(t.max_relative_error, 1e-4) << t.name;
  }
}

TEST(GradCheckTest, HeadOnlyModel) {
  const ProbeBatch batch = probe_batch();
  for (Strategy s : {Strategy::kMultiLabel, Strategy::kBinaryRelevance}) {
    EXPECT_LT(grad_check(s, probe(0), batch.sequences, batch.golds).max_relative_error, 1e-6)
        << strategy_name(s);
  }
}

TEST(GradCheckTest, TwoLayersAtInitialization) {
  const ProbeBatch batch = probe_batch();
  GradCheckOptions options;
  options.max_coordinates_per_tensor = 24;
  EXPECT_LT(grad_check(Strategy::kMultiLabel, probe(2), batch.sequences, batch.golds, options).max_relative_error,
            1e-4);
}

TEST(GradCheckTest, UnknownOnlyInput) {
  const ProbeBatch batch = probe_batch();
  const std::vector<TokenSequence> unk_only{batch.sequences.back()};
  const std::vector<LabelSet> golds{batch.golds.back()};
  const auto report = grad_check(Strategy::kMultiLabel, probe(1), unk_only, golds);
  EXPECT_LT(report.max_relative_error, 1e-4);
}

TEST(GradCheckTest, CorruptedGradientIsCaught) {
  const ProbeBatch batch = probe_batch();
  GradCheckOptions options;
  options.corrupt_analytic = true;
  EXPECT_GT(grad_check(Strategy::kMultiLabel, probe(1), batch.sequences, batch.golds, options).max_relative_error,
            1e-4);
}

TEST(GradCheckTest, Deterministic) {
  const ProbeBatch batch = probe_batch();
  const auto a = grad_check(Strategy::kBinaryRelevance, probe(1), batch.sequences, batch.golds);
  const auto b = grad_check(Strategy::kBinaryRelevance, probe(1), batch.sequences, batch.golds);
  EXPECT_EQ(a.max_relative_error, b.max_relative_error);
}

}  // namespace
}  // namespace phenotyper
