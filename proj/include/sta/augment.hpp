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

// Text editing augmentation.
//
// Six selective operators pick the words they edit by role (see keywords.hpp);
// four random baselines edit uniformly chosen words. All operators are pure
// functions of their inputs and an explicit Rng.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sta/corpus.hpp"
#include "sta/embeddings.hpp"
#include "sta/errors.hpp"
#include "sta/keywords.hpp"
#include "sta/parallel.hpp"
#include "sta/random.hpp"

namespace sta {

enum class Operator {
  kSelectiveReplacement,
  kOuterInsertion,
  kInnerInsertion,
  kSelectiveSwap,
  kNoiseDeletion,
  kPositiveSelection,
  kRandomReplacement,
  kRandomInsertion,
  kRandomSwap,
  kRandomDeletion,
};

inline constexpr std::array<std::pair<Operator, std::string_view>, 10> kOperatorNames{{
    {Operator::kSelectiveReplacement, "selective_replacement"},
    {Operator::kOuterInsertion, "outer_insertion"},
    {Operator::kInnerInsertion, "inner_insertion"},
    {Operator::kSelectiveSwap, "selective_swap"},
    {Operator::kNoiseDeletion, "noise_deletion"},
    {Operator::kPositiveSelection, "positive_selection"},
    {Operator::kRandomReplacement, "random_replacement"},
    {Operator::kRandomInsertion, "random_insertion"},
    {Operator::kRandomSwap, "random_swap"},
    {Operator::kRandomDeletion, "random_deletion"},
}};

inline std::string_view operator_name(Operator op) {
  for (const auto& [value, name] : kOperatorNames) {
    if (value == op) return name;
  }
  return "unknown";
}

inline std::optional<Operator> parse_operator(std::string_view name) {
  for (const auto& [value, n] : kOperatorNames) {
    if (n == name) return value;
  }
  return std::nullopt;
}

inline constexpr std::string_view kOriginalOperator = "original";

struct AugmentedSample {
  std::string id;
  std::string parent_id;
  std::optional<Operator> op;  // empty for a passed-through original
  std::vector<std::string> tokens;
  std::string label;

  std::string_view operator_label() const {
    return op ? operator_name(*op) : kOriginalOperator;
  }
};

// n = max(1, round(proportion * token count)).
inline std::size_t edit_count(std::size_t token_count, double proportion) {
  const auto n = std::lround(proportion * static_cast<double>(token_count));
  return static_cast<std::size_t>(std::max<long>(1, n));
}

// Synonym candidates are a word's top-k embedding neighbours, computed on
// first use and cached. Safe to share between threads.
class SynonymSource {
 public:
  explicit SynonymSource(const EmbeddingTable& table, std::size_t k = 10)
      : table_(&table), k_(k) {
    if (k == 0) throw ConfigError("synonym pool size must be positive");
  }

  // Empty for out-of-vocabulary words.
  const std::vector<std::string>& candidates(const std::string& word) const {
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(word); it != cache_.end()) return it->second;
    }
    std::vector<std::string> words;
    if (table_->contains(word)) {
      for (auto& n : nearest_neighbors(word, *table_, k_)) words.push_back(std::move(n.word));
    }
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(word, std::move(words)).first->second;
  }

  std::optional<std::string> draw(const std::string& word, Rng& rng) const {
    const auto& pool = candidates(word);
    if (pool.empty()) return std::nullopt;
    return pool[rng.uniform_index(pool.size())];
  }

  const EmbeddingTable& table() const { return *table_; }
  std::size_t k() const { return k_; }

 private:
  const EmbeddingTable* table_;
  std::size_t k_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, std::vector<std::string>> cache_;
};

namespace detail {

inline AugmentedSample make_sample(const Document& doc, Operator op,
                                   std::vector<std::string> tokens) {
  return {"", doc.id, op, std::move(tokens), doc.label};
}

// Up to n distinct positions whose token satisfies `preferred`; any shortfall
// is filled with uniformly drawn other positions.
template <class Pred>
std::vector<std::size_t> choose_positions(const std::vector<std::string>& tokens,
                                          Pred&& preferred, std::size_t n, Rng& rng) {
  std::vector<std::size_t> hits, rest;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    (preferred(tokens[i]) ? hits : rest).push_back(i);
  }
  if (hits.size() >= n) return rng.sample_from(std::move(hits), n);
  const std::size_t all_hits = hits.size();
  std::vector<std::size_t> chosen = rng.sample_from(std::move(hits), all_hits);
  auto extra = rng.sample_from(std::move(rest), n - chosen.size());
  chosen.insert(chosen.end(), extra.begin(), extra.end());
  return chosen;
}

inline std::vector<std::string> replace_at(const std::vector<std::string>& tokens,
                                           const std::vector<std::size_t>& positions,
                                           const SynonymSource& synonyms, Rng& rng) {
  std::vector<std::string> out = tokens;
  for (std::size_t p : positions) {
    if (auto s = synonyms.draw(tokens[p], rng)) out[p] = std::move(*s);
  }
  return out;
}

// Inserts a synonym of each selected token at a uniform gap 0..len.
inline std::vector<std::string> insert_synonyms(const std::vector<std::string>& tokens,
                                                const std::vector<std::size_t>& positions,
                                                const SynonymSource& synonyms, Rng& rng) {
  std::vector<std::string> out = tokens;
  for (std::size_t p : positions) {
    auto s = synonyms.draw(tokens[p], rng);
    if (!s) continue;
    const std::size_t gap = rng.uniform_index(out.size() + 1);
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(gap), std::move(*s));
  }
  return out;
}

// Swaps up to n preferred positions with as many distinct other positions.
template <class Pred>
std::vector<std::string> swap_pairs(const std::vector<std::string>& tokens,
                                    Pred&& preferred, std::size_t n, Rng& rng) {
  std::vector<std::string> out = tokens;
  if (tokens.size() < 2) return out;
  n = std::min(n, tokens.size() / 2);
  const auto first = choose_positions(tokens, preferred, n, rng);
  std::vector<bool> taken(tokens.size(), false);
  for (std::size_t p : first) taken[p] = true;
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!taken[i]) others.push_back(i);
  }
  const auto second = rng.sample_from(std::move(others), first.size());
  for (std::size_t i = 0; i < second.size(); ++i) std::swap(out[first[i]], out[second[i]]);
  return out;
}

inline constexpr auto kNoPreference = [](const std::string&) { return false; };

}  // namespace detail

inline AugmentedSample selective_replacement(const Document& doc, const RoleKeywords& roles,
                                             const SynonymSource& synonyms, std::size_t n,
                                             Rng& rng) {
  const auto positions = detail::choose_positions(
      doc.tokens, [&](const std::string& t) { return roles.is_cw(t); }, n, rng);
  return detail::make_sample(doc, Operator::kSelectiveReplacement,
                             detail::replace_at(doc.tokens, positions, synonyms, rng));
}

inline AugmentedSample outer_insertion(const Document& doc, const RoleKeywords& roles,
                                       const SynonymSource& synonyms, std::size_t n,
                                       Rng& rng) {
  const auto positions = detail::choose_positions(
      doc.tokens, [&](const std::string& t) { return roles.is_cw(t); }, n, rng);
  return detail::make_sample(doc, Operator::kOuterInsertion,
                             detail::insert_synonyms(doc.tokens, positions, synonyms, rng));
}

// Inserts n fake indicating words drawn, weighted by multiplicity, from the
// pools of every class other than the document's own.
inline AugmentedSample inner_insertion(const Document& doc, const FwPool& pool,
                                       std::size_t n, Rng& rng) {
  const auto& labels = pool.labels();
  const auto own = std::find(labels.begin(), labels.end(), doc.label);
  if (own == labels.end()) throw CorpusError("label '" + doc.label + "' has no FW pool");
  const auto others = pool.others(static_cast<std::size_t>(own - labels.begin()));
  std::vector<std::string> out = doc.tokens;
  std::size_t total = 0;
  for (const auto& [token, weight] : others) total += weight;
  if (total > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t ticket = rng.uniform_index(total);
      auto it = others.begin();
      while (ticket >= it->second) {
        ticket -= it->second;
        ++it;
      }
      const std::size_t gap = rng.uniform_index(out.size() + 1);
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(gap), it->first);
    }
  }
  return detail::make_sample(doc, Operator::kInnerInsertion, std::move(out));
}

inline AugmentedSample selective_swap(const Document& doc, const RoleKeywords& roles,
                                      std::size_t n, Rng& rng) {
  return detail::make_sample(
      doc, Operator::kSelectiveSwap,
      detail::swap_pairs(doc.tokens, [&](const std::string& t) { return roles.is_cw(t); },
                         n, rng));
}

// Drops every fake indicating word; keeps the first token if nothing survives.
inline AugmentedSample noise_deletion(const Document& doc, const RoleKeywords& roles) {
  std::vector<std::string> out;
  for (const std::string& t : doc.tokens) {
    if (!roles.is_fw(t)) out.push_back(t);
  }
  if (out.empty()) out.push_back(doc.tokens.front());
  return detail::make_sample(doc, Operator::kNoiseDeletion, std::move(out));
}

// The ordered subsequence of class-indicating words.
inline AugmentedSample positive_selection(const Document& doc, const RoleKeywords& roles) {
  std::vector<std::string> out;
  for (const std::string& t : doc.tokens) {
    if (roles.is_cw(t)) out.push_back(t);
  }
  if (out.empty()) out = doc.tokens;
  return detail::make_sample(doc, Operator::kPositiveSelection, std::move(out));
}

inline AugmentedSample random_replacement(const Document& doc, const SynonymSource& synonyms,
                                          std::size_t n, Rng& rng) {
  const auto positions = detail::choose_positions(doc.tokens, detail::kNoPreference, n, rng);
  return detail::make_sample(doc, Operator::kRandomReplacement,
                             detail::replace_at(doc.tokens, positions, synonyms, rng));
}

inline AugmentedSample random_insertion(const Document& doc, const SynonymSource& synonyms,
                                        std::size_t n, Rng& rng) {
  const auto positions = detail::choose_positions(doc.tokens, detail::kNoPreference, n, rng);
  return detail::make_sample(doc, Operator::kRandomInsertion,
                             detail::insert_synonyms(doc.tokens, positions, synonyms, rng));
}

inline AugmentedSample random_swap(const Document& doc, std::size_t n, Rng& rng) {
  return detail::make_sample(doc, Operator::kRandomSwap,
                             detail::swap_pairs(doc.tokens, detail::kNoPreference, n, rng));
}

// Removes each token independently with probability p; keeps the first token
// if all would go.
inline AugmentedSample random_deletion(const Document& doc, double p, Rng& rng) {
  std::vector<std::string> out;
  for (const std::string& t : doc.tokens) {
    if (!rng.bernoulli(p)) out.push_back(t);
  }
  if (out.empty()) out.push_back(doc.tokens.front());
  return detail::make_sample(doc, Operator::kRandomDeletion, std::move(out));
}

enum class Mode { kSta, kEda };

inline std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "sta") return Mode::kSta;
  if (name == "eda") return Mode::kEda;
  return std::nullopt;
}

inline std::vector<Operator> mix_operators(Mode mode) {
  if (mode == Mode::kSta) {
    return {Operator::kSelectiveReplacement, Operator::kOuterInsertion,
            Operator::kInnerInsertion,       Operator::kSelectiveSwap,
            Operator::kNoiseDeletion,        Operator::kPositiveSelection};
  }
  // Insertion and deletion twice each, to match the six selective operators.
  return {Operator::kRandomReplacement, Operator::kRandomSwap,
          Operator::kRandomInsertion,   Operator::kRandomInsertion,
          Operator::kRandomDeletion,    Operator::kRandomDeletion};
}

// "mix" expands to the mode's six-operator mix; an operator name repeats
// that operator `factor` times.
inline std::vector<Operator> resolve_operators(Mode mode, std::string_view choice,
                                               std::size_t factor) {
  if (choice == "mix") return mix_operators(mode);
  auto op = parse_operator(choice);
  if (!op) throw ConfigError("unknown operator '" + std::string(choice) + "'");
  if (factor == 0) throw ConfigError("augment factor must be positive");
  return std::vector<Operator>(factor, *op);
}

struct AugmentationConfig {
  double edit_proportion = 0.10;
  double alpha = 0.20;
  std::size_t augment_factor = 6;
  std::size_t synonym_pool_k = 10;
  std::uint64_t seed = 0;
  // Operators applied to every document, in order.
  std::vector<Operator> operators = mix_operators(Mode::kSta);

  void validate() const {
    if (!(edit_proportion > 0.0 && edit_proportion <= 1.0)) {
      throw ConfigError("edit proportion must lie in (0, 1]");
    }
    ExtractionConfig{alpha}.validate();
    if (augment_factor == 0) throw ConfigError("augment factor must be positive");
    if (synonym_pool_k == 0) throw ConfigError("synonym pool size must be positive");
  }
};

inline AugmentedSample apply_operator(Operator op, const Document& doc,
                                      const RoleKeywords& roles, const FwPool& pool,
                                      const SynonymSource& synonyms,
                                      double edit_proportion, Rng& rng) {
  const std::size_t n = edit_count(doc.tokens.size(), edit_proportion);
  switch (op) {
    case Operator::kSelectiveReplacement:
      return selective_replacement(doc, roles, synonyms, n, rng);
    case Operator::kOuterInsertion:
      return outer_insertion(doc, roles, synonyms, n, rng);
    case Operator::kInnerInsertion:
      return inner_insertion(doc, pool, n, rng);
    case Operator::kSelectiveSwap:
      return selective_swap(doc, roles, n, rng);
    case Operator::kNoiseDeletion:
      return noise_deletion(doc, roles);
    case Operator::kPositiveSelection:
      return positive_selection(doc, roles);
    case Operator::kRandomReplacement:
      return random_replacement(doc, synonyms, n, rng);
    case Operator::kRandomInsertion:
      return random_insertion(doc, synonyms, n, rng);
    case Operator::kRandomSwap:
      return random_swap(doc, n, rng);
    case Operator::kRandomDeletion:
      return random_deletion(doc, edit_proportion, rng);
  }
  throw ConfigError("unhandled operator");
}

// Per document: the original (operator "original") followed by one sample
// per configured operator. Each document draws from its own stream derived
// from (seed, id, position), so output does not depend on `threads`.
inline std::vector<AugmentedSample> augment_corpus(const LabeledCorpus& corpus,
                                                   const FittedKeywords& keywords,
                                                   const SynonymSource& synonyms,
                                                   const AugmentationConfig& config,
                                                   unsigned threads = 1) {
  config.validate();
  if (keywords.roles.size() != corpus.size()) {
    throw CorpusError("keywords were fitted on a different corpus");
  }
  std::vector<std::vector<AugmentedSample>> per_doc(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    const Document& doc = corpus[i];
    Rng rng(derive_seed(config.seed, doc.id, i));
    auto& out = per_doc[i];
    out.reserve(config.operators.size() + 1);
    out.push_back({doc.id, doc.id, std::nullopt, doc.tokens, doc.label});
    for (std::size_t j = 0; j < config.operators.size(); ++j) {
      AugmentedSample s = apply_operator(config.operators[j], doc, keywords.roles[i],
                                         keywords.fw_pool, synonyms,
                                         config.edit_proportion, rng);
      s.id = doc.id + "#" + std::to_string(j + 1);
      out.push_back(std::move(s));
    }
  });
  std::vector<AugmentedSample> all;
  all.reserve(corpus.size() * (config.operators.size() + 1));
  for (auto& samples : per_doc) {
    for (auto& s : samples) all.push_back(std::move(s));
  }
  return all;
}

inline void write_augmented(std::ostream& out, const std::vector<AugmentedSample>& samples) {
  for (const AugmentedSample& s : samples) {
    nlohmann::ordered_json record;
    record["id"] = s.id;
    record["text"] = join_tokens(s.tokens);
    record["label"] = s.label;
    record["parent_id"] = s.parent_id;
    record["operator"] = s.operator_label();
    out << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
        << '\n';
  }
}

}  // namespace sta
