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

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "phenotyper/corpus.hpp"
#include "phenotyper/error.hpp"
#include "phenotyper/rng.hpp"

namespace phenotyper {
namespace {

Corpus parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return read_corpus(in, CorpusFormat::kJsonl, "test.jsonl");
}

TEST(LabelSetTest, MaskAndCardinality) {
  LabelSet s{Label::SI, Label::NSSI};
  EXPECT_EQ(s.mask(), 0b1001);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains(Label::NSSI));
  EXPECT_FALSE(s.contains(Label::ES));
  EXPECT_EQ(s.to_string(), "SI+NSSI");
  EXPECT_EQ(LabelSet{}.to_string(), "none");
  EXPECT_TRUE(LabelSet{}.empty());
  EXPECT_EQ(LabelSet::from_mask(0xFF).size(), 4u);
}

TEST(LabelTest, FixedOrder) {
  EXPECT_EQ(label_name(kAllLabels[0]), "SI");
  EXPECT_EQ(label_name(kAllLabels[1]), "SA");
  EXPECT_EQ(label_name(kAllLabels[2]), "ES");
  EXPECT_EQ(label_name(kAllLabels[3]), "NSSI");
  EXPECT_EQ(parse_label("ES"), Label::ES);
  EXPECT_FALSE(parse_label("si").has_value());
}

TEST(LoadCorpusTest, JsonlFieldMapping) {
  const Corpus c = parse_jsonl(
      "{\"id\":\"n1\",\"text\":\"Endorses SI.\",\"labels\":[\"SI\",\"SA\"]}\n"
      "{\"id\":\"n2\",\"text\":\"Calm.\",\"labels\":[]}\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].id, "n1");
  EXPECT_EQ(c[0].text, "Endorses SI.");
  EXPECT_EQ(c[0].gold, (LabelSet{Label::SI, Label::SA}));
  EXPECT_TRUE(c[1].gold.empty());
}

TEST(LoadCorpusTest, DuplicateIdReportsLine) {
  try {
    parse_jsonl(
        "{\"id\":\"n1\",\"text\":\"a\",\"labels\":[]}\n"
        "{\"id\":\"n1\",\"text\":\"b\",\"labels\":[]}\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(LoadCorpusTest, UnknownLabelRejected) {
  EXPECT_THROW(parse_jsonl("{\"id\":\"n1\",\"text\":\"a\",\"labels\":[\"HI\"]}\n"), ParseError);
}

TEST(LoadCorpusTest, MalformedRecordReportsLine) {
  try {
    parse_jsonl("{\"id\":\"n1\",\"text\":\"a\",\"labels\":[]}\n\n{\"id\":\"n2\",\"text\":\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_jsonl("{\"id\":\"n1\",\"labels\":[]}\n"), ParseError);
  EXPECT_THROW(parse_jsonl("{\"id\":\"n1\",\"text\":\"\",\"labels\":[]}\n"), ParseError);
}

TEST(LoadCorpusTest, CsvTableShape) {
  std::istringstream in(
      "id,text,SI,SA,ES,NSSI\n"
      "n1,\"Reports SI, and a plan.\",1,0,0,0\n"
      "n2,\"Quoted \"\"word\"\" and\nsecond line\",0,1,0,1\n");
  const Corpus c = read_corpus(in, CorpusFormat::kCsv, "t.csv");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].text, "Reports SI, and a plan.");
  EXPECT_EQ(c[0].gold, LabelSet{Label::SI});
  EXPECT_EQ(c[1].text, "Quoted \"word\" and\nsecond line");
  EXPECT_EQ(c[1].gold, (LabelSet{Label::SA, Label::NSSI}));
}

TEST(LoadCorpusTest, CsvRejectsBadFlag) {
  std::istringstream in("id,text,SI,SA,ES,NSSI\nn1,x,2,0,0,0\n");
  EXPECT_THROW(read_corpus(in, CorpusFormat::kCsv, "t.csv"), ParseError);
}

Corpus random_corpus(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  const std::vector<std::string> alphabet = {"a", "b", "c", " ", ",", "\"", "\n", "\t", ".", ":", "é", "\\", "{", "}"};
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text = "x";
    const std::size_t len = rng.below(30);
    for (std::size_t k = 0; k < len; ++k) text += alphabet[rng.below(alphabet.size())];
    docs.push_back({"d" + std::to_string(i), text, LabelSet::from_mask(static_cast<std::uint8_t>(rng.below(16)))});
  }
  return Corpus(std::move(docs));
}

TEST(CorpusRoundTripTest, BothFormats) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Corpus original = random_corpus(seed, 25);
    for (CorpusFormat f : {CorpusFormat::kJsonl, CorpusFormat::kCsv}) {
      std::stringstream buffer;
      write_corpus(buffer, original, f);
      EXPECT_EQ(read_corpus(buffer, f), original) << "seed " << seed;
    }
  }
}

TEST(CorpusRoundTripTest, ThroughFile) {
  const Corpus original = random_corpus(99, 10);
  const auto path = std::filesystem::temp_directory_path() / "phenotyper_roundtrip.csv";
  write_corpus(path, original, CorpusFormat::kCsv);
  EXPECT_EQ(load_corpus(path), original);
  std::filesystem::remove(path);
}

TEST(LabelDistributionTest, HandCount) {
  const Corpus c({{"a", "t", {Label::SI, Label::SA}}, {"b", "t", {Label::SI}}});
  const auto d = label_distribution(c);
  EXPECT_EQ(d.per_label_counts[index_of(Label::SI)], 2u);
  EXPECT_EQ(d.per_label_counts[index_of(Label::SA)], 1u);
  EXPECT_EQ(d.pair_count(Label::SI, Label::SA), 1u);
  EXPECT_EQ(d.pair_count(Label::SA, Label::SI), 1u);
  EXPECT_EQ(d.pair_count(Label::ES, Label::NSSI), 0u);
  EXPECT_EQ(d.total_label_instances, 3u);
  EXPECT_EQ(d.cardinality_histogram[1], 1u);
  EXPECT_EQ(d.cardinality_histogram[2], 1u);
}

TEST(LabelDistributionTest, EmptyCorpusAllZero) {
  EXPECT_EQ(label_distribution(Corpus()), LabelDistribution{});
}

TEST(LabelDistributionTest, InvariantsOnRandomCorpora) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Corpus c = random_corpus(seed, 1 + seed * 3);
    const auto d = label_distribution(c);
    std::size_t per_label = 0, by_doc = 0, hist = 0, single = 0;
    for (std::size_t v : d.per_label_counts) per_label += v;
    for (const auto& doc : c) by_doc += doc.gold.size();
    for (std::size_t v : d.cardinality_histogram) hist += v;
    for (std::size_t v : d.single_label_breakdown) single += v;
    EXPECT_EQ(d.total_label_instances, per_label);
    EXPECT_EQ(d.total_label_instances, by_doc);
    EXPECT_EQ(hist, c.size());
    EXPECT_EQ(single, d.cardinality_histogram[1]);
  }
}

}  // namespace
}  // namespace phenotyper
