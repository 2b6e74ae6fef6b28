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

#include "sta/augment.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "synthetic.hpp"

namespace sta {
namespace {

using Tokens = std::vector<std::string>;

RoleKeywords make_roles(const Tokens& tokens, const std::set<std::string>& cw,
                        const std::set<std::string>& fw) {
  RoleKeywords r;
  for (const std::string& t : distinct_tokens(tokens)) {
    if (cw.contains(t)) {
      r.cw.push_back(t);
      r.roles[t] = Role::kClassIndicating;
    } else if (fw.contains(t)) {
      r.fw.push_back(t);
      r.roles[t] = Role::kFakeIndicating;
    } else {
      r.iw.push_back(t);
      r.roles[t] = Role::kIrrelevant;
    }
  }
  return r;
}

Document doc_of(const Tokens& tokens, std::string label = "x") {
  return {"d", tokens, std::move(label)};
}

EmbeddingTable parse(const std::string& text) {
  std::istringstream in(text);
  return read_embeddings(in);
}

std::map<std::string, int> multiset(const Tokens& tokens) {
  std::map<std::string, int> out;
  for (const auto& t : tokens) ++out[t];
  return out;
}

// True when `sub` can be obtained from `full` by deleting tokens.
bool is_subsequence(const Tokens& sub, const Tokens& full) {
  std::size_t j = 0;
  for (const std::string& t : full) {
    if (j < sub.size() && sub[j] == t) ++j;
  }
  return j == sub.size();
}

std::size_t positions_changed(const Tokens& a, const Tokens& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

TEST(EditCountTest, RoundsWithFloorOfOne) {
  EXPECT_EQ(edit_count(20, 0.1), 2u);
  EXPECT_EQ(edit_count(25, 0.1), 3u);
  EXPECT_EQ(edit_count(24, 0.1), 2u);
  EXPECT_EQ(edit_count(3, 0.1), 1u);
  EXPECT_EQ(edit_count(1, 0.1), 1u);
}

TEST(OperatorNamesTest, RoundTrip) {
  for (const auto& [op, name] : kOperatorNames) {
    EXPECT_EQ(parse_operator(name), op);
    EXPECT_EQ(operator_name(op), name);
  }
  EXPECT_FALSE(parse_operator("bogus").has_value());
}

TEST(SynonymSourceTest, NearestNeighboursAndOov) {
  const auto table = parse("b 1 0\nbb 0.9 0.1\nc 0 1\n");
  const SynonymSource synonyms(table, 1);
  EXPECT_EQ(synonyms.candidates("b"), (Tokens{"bb"}));
  EXPECT_TRUE(synonyms.candidates("zzz").empty());
  Rng rng(1);
  EXPECT_EQ(synonyms.draw("b", rng), "bb");
  EXPECT_FALSE(synonyms.draw("zzz", rng).has_value());
  EXPECT_THROW(SynonymSource(table, 0), ConfigError);
}

TEST(SelectiveReplacementTest, ForcedChoice) {
  const auto table = parse("b 1 0\nbb 0.9 0.1\na 0 1\n");
  const SynonymSource synonyms(table, 1);
  const auto doc = doc_of({"a", "b", "c"});
  Rng rng(3);
  const auto out = selective_replacement(doc, make_roles(doc.tokens, {"b"}, {}), synonyms, 1, rng);
  EXPECT_EQ(out.tokens, (Tokens{"a", "bb", "c"}));
  EXPECT_EQ(out.op, Operator::kSelectiveReplacement);
  EXPECT_EQ(out.parent_id, "d");
}

TEST(SelectiveReplacementTest, OovClassWordsStayUnchanged) {
  const auto table = parse("a 1 0\nz 0 1\n");
  const SynonymSource synonyms(table);
  const auto doc = doc_of({"a", "q", "r", "q"});
  Rng rng(4);
  const auto out =
      selective_replacement(doc, make_roles(doc.tokens, {"q", "r"}, {}), synonyms, 3, rng);
  EXPECT_EQ(out.tokens, doc.tokens);
}

TEST(OuterInsertionTest, ForcedChoiceGrowsByOne) {
  const auto table = parse("a 1 0\naa 0.9 0.1\nb 0 1\n");
  const SynonymSource synonyms(table, 1);
  const auto doc = doc_of({"a", "b"});
  std::set<Tokens> seen;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto out = outer_insertion(doc, make_roles(doc.tokens, {"a"}, {}), synonyms, 1, rng);
    ASSERT_EQ(out.tokens.size(), 3u);
    EXPECT_TRUE(is_subsequence(doc.tokens, out.tokens));
    EXPECT_EQ(std::count(out.tokens.begin(), out.tokens.end(), "aa"), 1);
    seen.insert(out.tokens);
  }
  EXPECT_EQ(seen.size(), 3u);
}

TEST(OuterInsertionTest, InsertsOnePerInVocabularyClassWord) {
  const auto table = parse("a 1 0\nb 0 1\nc 1 1\nd -1 0\n");
  const SynonymSource synonyms(table, 2);
  const auto doc = doc_of({"a", "b", "c", "x", "y"});
  Rng rng(9);
  const auto out =
      outer_insertion(doc, make_roles(doc.tokens, {"a", "b", "c"}, {}), synonyms, 3, rng);
  EXPECT_EQ(out.tokens.size(), 8u);
}

TEST(InnerInsertionTest, ForcedDrawAndEmptyPool) {
  FwPool pool({"x", "y"});
  pool.add(1, {"q"});
  pool.add(0, {"own"});
  const auto doc = doc_of({"a", "b"}, "x");
  Rng rng(2);
  const auto out = inner_insertion(doc, pool, 1, rng);
  EXPECT_EQ(out.tokens.size(), 3u);
  EXPECT_EQ(std::count(out.tokens.begin(), out.tokens.end(), "q"), 1);
  EXPECT_TRUE(is_subsequence(doc.tokens, out.tokens));

  FwPool empty({"x", "y"});
  empty.add(0, {"own"});
  EXPECT_EQ(inner_insertion(doc, empty, 3, rng).tokens, doc.tokens);
  EXPECT_THROW(inner_insertion(doc_of({"a"}, "nope"), pool, 1, rng), CorpusError);
}

TEST(InnerInsertionTest, DrawsOnlyFromOtherClasses) {
  FwPool pool({"x", "y"});
  pool.add(0, {"mine1", "mine2"});
  pool.add(1, {"t1", "t2"});
  pool.add(1, {"t2"});
  const auto doc = doc_of({"a", "b", "c"}, "x");
  std::map<std::string, int> draws;
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    Rng rng(seed);
    const auto out = inner_insertion(doc, pool, 2, rng);
    ASSERT_EQ(out.tokens.size(), 5u);
    for (const auto& t : out.tokens) {
      if (t != "a" && t != "b" && t != "c") ++draws[t];
    }
  }
  EXPECT_EQ(draws.size(), 2u);
  // t2 carries weight 2 of 3.
  const double share = draws["t2"] / static_cast<double>(draws["t1"] + draws["t2"]);
  EXPECT_NEAR(share, 2.0 / 3.0, 0.03);
}

TEST(SelectiveSwapTest, Examples) {
  Rng rng(1);
  const auto pair = doc_of({"a", "b"});
  EXPECT_EQ(selective_swap(pair, make_roles(pair.tokens, {"a"}, {}), 1, rng).tokens,
            (Tokens{"b", "a"}));
  const auto single = doc_of({"a"});
  EXPECT_EQ(selective_swap(single, make_roles(single.tokens, {"a"}, {}), 1, rng).tokens,
            single.tokens);
}

TEST(SelectiveSwapTest, HundredTokensTenSwapsChangeAtMostTwenty) {
  Rng rng(5);
  Tokens tokens;
  for (int i = 0; i < 100; ++i) tokens.push_back("t" + std::to_string(i));
  const auto doc = doc_of(tokens);
  const auto roles = make_roles(tokens, {"t3", "t50", "t70"}, {});
  for (int trial = 0; trial < 100; ++trial) {
    const auto out = selective_swap(doc, roles, 10, rng);
    EXPECT_LE(positions_changed(tokens, out.tokens), 20u);
    EXPECT_EQ(multiset(out.tokens), multiset(tokens));
  }
}

TEST(NoiseDeletionTest, Examples) {
  const auto doc = doc_of({"a", "b", "c"});
  EXPECT_EQ(noise_deletion(doc, make_roles(doc.tokens, {}, {"b"})).tokens, (Tokens{"a", "c"}));
  EXPECT_EQ(noise_deletion(doc, make_roles(doc.tokens, {}, {"a", "b", "c"})).tokens,
            (Tokens{"a"}));
}

TEST(PositiveSelectionTest, Examples) {
  const auto doc = doc_of({"a", "b", "c", "d", "b"});
  EXPECT_EQ(positive_selection(doc, make_roles(doc.tokens, {"b", "d"}, {})).tokens,
            (Tokens{"b", "d", "b"}));
  EXPECT_EQ(positive_selection(doc, make_roles(doc.tokens, {"a", "b", "c", "d"}, {})).tokens,
            doc.tokens);
  EXPECT_EQ(positive_selection(doc, make_roles(doc.tokens, {}, {"a"})).tokens, doc.tokens);
}

TEST(RandomOperatorsTest, Examples) {
  Rng rng(8);
  const auto pair = doc_of({"a", "b"});
  EXPECT_EQ(random_swap(pair, 1, rng).tokens, (Tokens{"b", "a"}));
  const auto doc = doc_of({"a", "b", "c", "d"});
  EXPECT_EQ(random_deletion(doc, 0.0, rng).tokens, doc.tokens);
  EXPECT_EQ(random_deletion(doc, 1.0, rng).tokens, (Tokens{"a"}));

  const auto table = parse("a 1 0\nb 0 1\nc 1 1\nd -1 0\n");
  const SynonymSource synonyms(table, 3);
  for (int trial = 0; trial < 100; ++trial) {
    EXPECT_LE(positions_changed(doc.tokens, random_replacement(doc, synonyms, 2, rng).tokens), 2u);
    EXPECT_EQ(random_insertion(doc, synonyms, 2, rng).tokens.size(), 6u);
  }
}

// Random documents with fitted keywords, for contract checks.
struct World {
  LabeledCorpus corpus = testing::random_corpus(300, 3, 60, 1, 40, 77);
  EmbeddingTable table = make_table();
  FittedKeywords keywords = fit_keywords(corpus, table, {0.2});
  SynonymSource synonyms{table, 10};

  static EmbeddingTable make_table() {
    Tokens words = {"c0", "c1", "c2", "c3"};
    for (std::size_t i = 0; i < 60; ++i) {
      if (i % 9 != 4) words.push_back(testing::word_name("w", i));
    }
    for (std::size_t i = 0; i < 30; ++i) words.push_back(testing::word_name("extra", i));
    return testing::random_embeddings(words, 8, 5);
  }
};

TEST(OperatorContractTest, SelectiveOperatorsPreferClassWords) {
  const World w;
  Rng rng(10);
  for (std::size_t i = 0; i < w.corpus.size(); ++i) {
    const Document& doc = w.corpus[i];
    const RoleKeywords& roles = w.keywords.roles[i];
    const std::size_t n = edit_count(doc.tokens.size(), 0.1);
    std::size_t cw_positions = 0;
    for (const auto& t : doc.tokens) cw_positions += roles.is_cw(t);

    const auto rep = selective_replacement(doc, roles, w.synonyms, n, rng);
    ASSERT_EQ(rep.tokens.size(), doc.tokens.size());
    EXPECT_LE(positions_changed(doc.tokens, rep.tokens), n);
    const auto swapped = selective_swap(doc, roles, n, rng);
    EXPECT_EQ(multiset(swapped.tokens), multiset(doc.tokens));
    if (cw_positions >= n) {
      for (std::size_t p = 0; p < doc.tokens.size(); ++p) {
        if (rep.tokens[p] != doc.tokens[p]) {
          EXPECT_TRUE(roles.is_cw(doc.tokens[p]));
        }
        if (swapped.tokens[p] != doc.tokens[p]) {
          EXPECT_TRUE(roles.is_cw(doc.tokens[p]) || roles.is_cw(swapped.tokens[p]));
        }
      }
    }

    const auto ins = outer_insertion(doc, roles, w.synonyms, n, rng);
    EXPECT_GE(ins.tokens.size(), doc.tokens.size());
    EXPECT_LE(ins.tokens.size(), doc.tokens.size() + n);
    EXPECT_TRUE(is_subsequence(doc.tokens, ins.tokens));
    auto extra = multiset(ins.tokens);
    for (const auto& t : doc.tokens) --extra[t];
    for (const auto& [t, k] : extra) {
      EXPECT_GE(k, 0);
      if (k == 0) continue;
      bool is_synonym = false;
      for (const auto& source : doc.tokens) {
        const auto& c = w.synonyms.candidates(source);
        is_synonym = is_synonym || std::find(c.begin(), c.end(), t) != c.end();
      }
      EXPECT_TRUE(is_synonym) << t;
    }
  }
}

TEST(AugmentCorpusTest, StaMixOnFiveHundredDocuments) {
  const auto corpus = testing::random_corpus(500, 4, 80, 5, 30, 1);
  const auto table = World::make_table();
  const auto keywords = fit_keywords(corpus, table, {0.2});
  const SynonymSource synonyms(table);
  const auto samples = augment_corpus(corpus, keywords, synonyms, AugmentationConfig{});
  ASSERT_EQ(samples.size(), 3500u);
  std::size_t originals = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Document& parent = corpus[i / 7];
    EXPECT_EQ(samples[i].parent_id, parent.id);
    EXPECT_EQ(samples[i].label, parent.label);
    EXPECT_FALSE(samples[i].tokens.empty());
    if (i % 7 == 0) {
      ++originals;
      EXPECT_FALSE(samples[i].op.has_value());
      EXPECT_EQ(samples[i].tokens, parent.tokens);
      EXPECT_EQ(samples[i].operator_label(), "original");
    } else {
      EXPECT_EQ(samples[i].op, mix_operators(Mode::kSta)[i % 7 - 1]);
      EXPECT_EQ(samples[i].id, parent.id + "#" + std::to_string(i % 7));
    }
  }
  EXPECT_EQ(originals, 500u);
}

TEST(AugmentCorpusTest, SingleOperatorFactorOne) {
  const World w;
  AugmentationConfig config;
  config.operators = resolve_operators(Mode::kSta, "positive_selection", 1);
  const auto samples = augment_corpus(w.corpus, w.keywords, w.synonyms, config);
  ASSERT_EQ(samples.size(), 2 * w.corpus.size());
  for (std::size_t i = 0; i < w.corpus.size(); ++i) {
    const auto& s = samples[2 * i + 1];
    EXPECT_EQ(s.op, Operator::kPositiveSelection);
    EXPECT_TRUE(is_subsequence(s.tokens, w.corpus[i].tokens));
    if (!w.keywords.roles[i].cw.empty()) {
      for (const auto& t : s.tokens) EXPECT_TRUE(w.keywords.roles[i].is_cw(t));
    }
  }
}

std::string render(const std::vector<AugmentedSample>& samples) {
  std::ostringstream out;
  write_augmented(out, samples);
  return out.str();
}

TEST(AugmentCorpusTest, DeterministicAcrossRunsAndThreads) {
  const World w;
  AugmentationConfig config;
  config.seed = 42;
  const auto a = render(augment_corpus(w.corpus, w.keywords, w.synonyms, config, 1));
  const auto b = render(augment_corpus(w.corpus, w.keywords, w.synonyms, config, 1));
  const auto c = render(augment_corpus(w.corpus, w.keywords, w.synonyms, config, 4));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  config.seed = 43;
  EXPECT_NE(a, render(augment_corpus(w.corpus, w.keywords, w.synonyms, config, 1)));
}

TEST(AugmentCorpusTest, WriteAugmentedFormat) {
  const std::vector<AugmentedSample> samples = {
      {"d1", "d1", std::nullopt, {"a", "b"}, "x"},
      {"d1#1", "d1", Operator::kRandomSwap, {"b", "a"}, "x"}};
  EXPECT_EQ(render(samples),
            "{\"id\":\"d1\",\"text\":\"a b\",\"label\":\"x\",\"parent_id\":\"d1\","
            "\"operator\":\"original\"}\n"
            "{\"id\":\"d1#1\",\"text\":\"b a\",\"label\":\"x\",\"parent_id\":\"d1\","
            "\"operator\":\"random_swap\"}\n");
}

TEST(ResolveOperatorsTest, MixesAndErrors) {
  EXPECT_EQ(resolve_operators(Mode::kEda, "mix", 6),
            (std::vector<Operator>{Operator::kRandomReplacement, Operator::kRandomSwap,
                                   Operator::kRandomInsertion, Operator::kRandomInsertion,
                                   Operator::kRandomDeletion, Operator::kRandomDeletion}));
  EXPECT_EQ(resolve_operators(Mode::kSta, "mix", 1).size(), 6u);
  EXPECT_EQ(resolve_operators(Mode::kSta, "noise_deletion", 4),
            std::vector<Operator>(4, Operator::kNoiseDeletion));
  EXPECT_THROW(resolve_operators(Mode::kSta, "shuffle_everything", 6), ConfigError);
  EXPECT_THROW(resolve_operators(Mode::kSta, "random_swap", 0), ConfigError);
  EXPECT_FALSE(parse_mode("other").has_value());
}

TEST(AugmentationConfigTest, Validation) {
  AugmentationConfig config;
  EXPECT_NO_THROW(config.validate());
  EXPECT_DOUBLE_EQ(config.edit_proportion, 0.10);
  EXPECT_DOUBLE_EQ(config.alpha, 0.20);
  EXPECT_EQ(config.augment_factor, 6u);
  config.edit_proportion = 0.0;
  EXPECT_THROW(config.validate(), ConfigError);
  config.edit_proportion = 0.1;
  config.alpha = 2.0;
  EXPECT_THROW(config.validate(), ConfigError);
}

}  // namespace
}  // namespace sta
