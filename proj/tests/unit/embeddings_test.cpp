// Copyright 2026 The STA Authors.
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

#include "sta/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace sta {
namespace {

EmbeddingTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_embeddings(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const LoadError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected LoadError";
  return 0;
}

TEST(ReadEmbeddingsTest, ThreeWords) {
  const auto table = parse("a 1 0 0\nb 0 1 0\nc 0 0 1\n");
  EXPECT_EQ(table.size(), 3u);
  EXPECT_EQ(table.dimension(), 3u);
  EXPECT_EQ(oracle::as_double(*table.find("b")), (std::vector<double>{0, 1, 0}));
  EXPECT_FALSE(table.find("d").has_value());
}

TEST(ReadEmbeddingsTest, HeaderLineIsSkipped) {
  const auto table = parse("2 2\nx 1 2\ny 3 4\n");
  EXPECT_EQ(table.size(), 2u);
  EXPECT_EQ(table.dimension(), 2u);
  EXPECT_FALSE(table.contains("2"));
}

TEST(ReadEmbeddingsTest, DimensionMismatchNamesLine) {
  EXPECT_EQ(error_line("a 1 0 0\nb 0 1 0\nc 0 1\n"), 3u);
  EXPECT_EQ(error_line("3 2\na 1 0\nb 1 0 0\n"), 3u);
}

TEST(ReadEmbeddingsTest, DuplicateWordKeepsFirstOccurrence) {
  std::string text;
  for (int i = 1; i <= 10; ++i) {
    const std::string word = (i == 5 || i == 9) ? "dup" : "w" + std::to_string(i);
    text += word + " " + std::to_string(i) + " 1\n";
  }
  const auto table = parse(text);
  EXPECT_EQ(table.size(), 9u);
  EXPECT_EQ((*table.find("dup"))[0], 5.0f);
}

TEST(ReadEmbeddingsTest, RejectsZeroVectorEmptyFileAndBadNumbers) {
  EXPECT_EQ(error_line("a 1 1\nz 0 0\n"), 2u);
  EXPECT_THROW(parse(""), LoadError);
  EXPECT_THROW(parse("\n\n"), LoadError);
  EXPECT_EQ(error_line("a 1 x\n"), 1u);
  EXPECT_EQ(error_line("a 1 2\nlonely\n"), 2u);
}

TEST(EmbeddingTableTest, AddValidates) {
  EmbeddingTable table(2);
  EXPECT_TRUE(table.add("a", std::vector<double>{1, 0}));
  EXPECT_FALSE(table.add("a", std::vector<double>{0, 1}));
  EXPECT_THROW(table.add("b", std::vector<double>{1, 0, 0}), DomainError);
  EXPECT_THROW(table.add("c", std::vector<double>{0, 0}), DomainError);
  EXPECT_DOUBLE_EQ(table.norm(0), 1.0);
}

TEST(CosineTest, Examples) {
  const std::vector<double> x{1, 0}, y{0, 1}, z{-1, 0}, w{2, 0};
  EXPECT_DOUBLE_EQ(cosine(x, y), 0.0);
  EXPECT_DOUBLE_EQ(cosine(x, z), -1.0);
  EXPECT_DOUBLE_EQ(cosine(x, w), 1.0);
  EXPECT_THROW(cosine(x, std::vector<double>{0, 0}), DomainError);
  EXPECT_THROW(cosine(x, std::vector<double>{1, 0, 0}), std::invalid_argument);
}

TEST(CosineTest, SymmetricBoundedAndScaleInvariant) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + rng.uniform_index(20);
    const auto a = testing::gaussian_vector(rng, dim);
    const auto b = testing::gaussian_vector(rng, dim);
    const double c = cosine(a, b);
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
    EXPECT_DOUBLE_EQ(c, cosine(b, a));
    EXPECT_NEAR(c, oracle::cosine(a, b), 1e-12);
    auto scaled = a;
    const double k = 0.1 + 10.0 * rng.uniform_real();
    for (double& x : scaled) x *= k;
    EXPECT_NEAR(cosine(scaled, b), c, 1e-12);
    EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
  }
}

TEST(LabelVectorTest, SingleWordLabel) {
  const auto table = parse("sport 1 2\nnews 3 4\n");
  EXPECT_EQ(label_vector("sport", table).vector, (std::vector<double>{1, 2}));
}

TEST(LabelVectorTest, CompoundLabelAveragesParts) {
  const auto table = parse("world 1 0\nnews 0 1\n");
  EXPECT_EQ(label_vector("world_news", table).vector, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(label_vector("World-News", table).vector, (std::vector<double>{0.5, 0.5}));
}

TEST(LabelVectorTest, UnrepresentableLabel) {
  const auto table = parse("sport 1 0\n");
  EXPECT_THROW(label_vector("misc", table), UnrepresentableLabelError);
}

TEST(LabelVectorTest, DescriptionTakesPrecedence) {
  const auto table = parse("c1 1 0\nathletics 0 2\ngames 0 4\n");
  const auto v = label_vector("c1", table, {{"c1", "Athletics and games, mostly."}});
  EXPECT_EQ(v.vector, (std::vector<double>{0, 3}));
}

TEST(NearestNeighborsTest, SmallExample) {
  const auto table = parse("a 1 0\nb 0.9 0.1\nc 0 1\n");
  const auto top = nearest_neighbors("a", table, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].word, "b");
  EXPECT_NEAR(top[0].similarity, 0.9 / std::sqrt(0.82), 1e-6);
  const auto all = nearest_neighbors("a", table, 10);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1].word, "c");
  EXPECT_THROW(nearest_neighbors("zzz", table, 3), OovError);
}

TEST(NearestNeighborsTest, TiesBreakByWord) {
  const auto table = parse("q 1 0\nz 0 1\ny 0 2\nx -1 0\n");
  const auto top = nearest_neighbors("q", table, 2);
  EXPECT_EQ(top[0].word, "y");
  EXPECT_EQ(top[1].word, "z");
}

TEST(NearestNeighborsTest, MatchesBruteForce) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < 100; ++i) words.push_back(testing::word_name("w", i));
  const auto table = testing::random_embeddings(words, 16, 21);
  for (const std::string q : {"w0", "w17", "w99"}) {
    const auto got = nearest_neighbors(q, table, 10);
    const auto want = oracle::neighbors(q, table, 10);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].word, want[i].first) << q << " rank " << i;
      EXPECT_NEAR(got[i].similarity, want[i].second, 1e-9);
    }
  }
}

TEST(NearestNeighborsTest, PrefixSortedAndExcludesQuery) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < 60; ++i) words.push_back(testing::word_name("v", i));
  const auto table = testing::random_embeddings(words, 8, 4);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::string q = words[rng.uniform_index(words.size())];
    const std::size_t k = 1 + rng.uniform_index(70);
    const auto small = nearest_neighbors(q, table, k);
    const auto large = nearest_neighbors(q, table, k + 5);
    EXPECT_EQ(small.size(), std::min<std::size_t>(k, words.size() - 1));
    for (std::size_t i = 0; i < small.size(); ++i) {
      EXPECT_EQ(small[i].word, large[i].word);
      EXPECT_NE(small[i].word, q);
      if (i > 0) {
        EXPECT_GE(small[i - 1].similarity, small[i].similarity);
      }
    }
  }
}

}  // namespace
}  // namespace sta
