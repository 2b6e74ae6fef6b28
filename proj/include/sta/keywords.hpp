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

// Role keyword extraction.
//
// Every word of a document is scored twice against the document's class:
// by weighted log-likelihood ratio (how much more often the word occurs in
// that class than in all other classes) and by cosine similarity with the
// label vector. The top-alpha words by each score form the correlated set
// W_c and the similar set W_s; the document's distinct words then split into
//
//   class-indicating words  cw = W_c & W_s
//   fake indicating words   fw = W_c - W_s
//   irrelevant words        iw = D - W_c

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sta/corpus.hpp"
#include "sta/embeddings.hpp"
#include "sta/errors.hpp"
#include "sta/parallel.hpp"

namespace sta {

inline constexpr double kDefaultWllrEpsilon = 1e-6;

// wllr(w, y) for every vocabulary token and class, with add-epsilon smoothing
// on both p(w|y) and p(w|not y).
class WllrTable {
 public:
  WllrTable(const ClassTokenCounts& counts, double epsilon)
      : labels_(counts.labels()), epsilon_(epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("WLLR epsilon must be positive");
    const std::size_t k = labels_.size();
    if (k < 2) throw DomainError("WLLR needs at least two classes");
    const auto& vocab = counts.vocabulary();
    const double smoothing = epsilon * static_cast<double>(vocab.size());

    std::uint64_t grand_total = 0;
    for (std::size_t c = 0; c < k; ++c) grand_total += counts.total(c);
    std::vector<double> in_denom(k), out_denom(k);
    for (std::size_t c = 0; c < k; ++c) {
      in_denom[c] = static_cast<double>(counts.total(c)) + smoothing;
      out_denom[c] = static_cast<double>(grand_total - counts.total(c)) + smoothing;
    }

    scores_.resize(vocab.size() * k);
    std::vector<std::uint64_t> per_class(k);
    for (std::size_t t = 0; t < vocab.size(); ++t) {
      std::uint64_t all = 0;
      for (std::size_t c = 0; c < k; ++c) {
        per_class[c] = counts.count(c, vocab[t]);
        all += per_class[c];
      }
      for (std::size_t c = 0; c < k; ++c) {
        scores_[t * k + c] = score_from_counts(per_class[c], all - per_class[c],
                                               in_denom[c], out_denom[c]);
      }
      row_.emplace(vocab[t], t);
    }
    unseen_.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
      unseen_[c] = score_from_counts(0, 0, in_denom[c], out_denom[c]);
    }
  }

  const std::vector<std::string>& labels() const { return labels_; }
  double epsilon() const { return epsilon_; }

  // Tokens outside the fitted vocabulary score as if their counts were zero.
  double score(const std::string& token, std::size_t label) const {
    auto it = row_.find(token);
    if (it == row_.end()) return unseen_[label];
    return scores_[it->second * labels_.size() + label];
  }

 private:
  double score_from_counts(std::uint64_t in_class, std::uint64_t out_class,
                           double in_denom, double out_denom) const {
    const double p_in = (static_cast<double>(in_class) + epsilon_) / in_denom;
    const double p_out = (static_cast<double>(out_class) + epsilon_) / out_denom;
    return p_in * std::log(p_in / p_out);
  }

  std::vector<std::string> labels_;
  double epsilon_;
  std::vector<double> scores_;  // row-major: token x label
  std::unordered_map<std::string, std::size_t> row_;
  std::vector<double> unseen_;
};

inline WllrTable compute_wllr(const ClassTokenCounts& counts,
                              double epsilon = kDefaultWllrEpsilon) {
  return WllrTable(counts, epsilon);
}

inline constexpr double kOovSimilarity = -std::numeric_limits<double>::infinity();

// Cosine similarity of each token with each label vector; tokens without an
// embedding score -inf so they never rank into the similar set.
class SimilarityTable {
 public:
  SimilarityTable(const std::vector<std::string>& vocabulary,
                  const std::vector<std::string>& labels, const EmbeddingTable& table,
                  const std::map<std::string, std::string>& descriptions = {})
      : labels_(labels) {
    std::vector<LabelVector> label_vectors;
    label_vectors.reserve(labels.size());
    for (const std::string& label : labels) {
      label_vectors.push_back(label_vector(label, table, descriptions));
    }
    for (const std::string& token : vocabulary) {
      std::vector<double> row(labels.size(), kOovSimilarity);
      if (auto v = table.find(token)) {
        for (std::size_t c = 0; c < labels.size(); ++c) {
          row[c] = cosine(*v, label_vectors[c].vector);
        }
      }
      scores_.emplace(token, std::move(row));
    }
  }

  const std::vector<std::string>& labels() const { return labels_; }

  double score(const std::string& token, std::size_t label) const {
    auto it = scores_.find(token);
    return it == scores_.end() ? kOovSimilarity : it->second[label];
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::vector<double>> scores_;
};

inline SimilarityTable compute_similarity(
    const std::vector<std::string>& vocabulary, const std::vector<std::string>& labels,
    const EmbeddingTable& table,
    const std::map<std::string, std::string>& descriptions = {}) {
  return SimilarityTable(vocabulary, labels, table, descriptions);
}

struct ExtractionConfig {
  double alpha = 0.2;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  }
};

enum class Role { kClassIndicating, kFakeIndicating, kIrrelevant };

struct RoleKeywords {
  // Each list is ordered by first occurrence in the document.
  std::vector<std::string> cw;
  std::vector<std::string> fw;
  std::vector<std::string> iw;
  std::unordered_map<std::string, Role> roles;

  bool is(Role role, const std::string& token) const {
    auto it = roles.find(token);
    return it != roles.end() && it->second == role;
  }
  bool is_cw(const std::string& token) const { return is(Role::kClassIndicating, token); }
  bool is_fw(const std::string& token) const { return is(Role::kFakeIndicating, token); }
};

// Number of distinct tokens admitted to each top-alpha set: max(1, ceil(a*n)).
// The small slack keeps products such as 0.1 * 30 from rounding up to 4.
inline std::size_t top_count(double alpha, std::size_t distinct) {
  const double exact = alpha * static_cast<double>(distinct);
  const auto m = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(distinct, 1));
}

// Distinct tokens in first-occurrence order.
inline std::vector<std::string> distinct_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const std::string& t : tokens) {
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

namespace detail {

// Indices into `distinct` of the top-m entries by score. The stable sort
// breaks ties by first occurrence; positions are unique so the order is total.
template <class Score>
std::vector<bool> top_mask(const std::vector<std::string>& distinct, std::size_t m,
                           Score&& score) {
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(distinct.size());
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    ranked.emplace_back(score(distinct[i]), i);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<bool> mask(distinct.size(), false);
  for (std::size_t i = 0; i < m && i < ranked.size(); ++i) mask[ranked[i].second] = true;
  return mask;
}

}  // namespace detail

inline RoleKeywords extract_role_keywords(const Document& doc, const WllrTable& wllr,
                                          const SimilarityTable& sim,
                                          const ExtractionConfig& config,
                                          std::size_t label_index) {
  config.validate();
  const std::vector<std::string> distinct = distinct_tokens(doc.tokens);
  const std::size_t m = top_count(config.alpha, distinct.size());
  const auto correlated = detail::top_mask(
      distinct, m, [&](const std::string& t) { return wllr.score(t, label_index); });
  const auto similar = detail::top_mask(
      distinct, m, [&](const std::string& t) { return sim.score(t, label_index); });
  RoleKeywords out;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    Role role;
    if (!correlated[i]) {
      role = Role::kIrrelevant;
      out.iw.push_back(distinct[i]);
    } else if (similar[i]) {
      role = Role::kClassIndicating;
      out.cw.push_back(distinct[i]);
    } else {
      role = Role::kFakeIndicating;
      out.fw.push_back(distinct[i]);
    }
    out.roles.emplace(distinct[i], role);
  }
  return out;
}

// Resolves the document's label against the WLLR table's label list.
inline RoleKeywords extract_role_keywords(const Document& doc, const WllrTable& wllr,
                                          const SimilarityTable& sim,
                                          const ExtractionConfig& config) {
  const auto& labels = wllr.labels();
  auto it = std::find(labels.begin(), labels.end(), doc.label);
  if (it == labels.end()) throw CorpusError("label '" + doc.label + "' was not fitted");
  return extract_role_keywords(doc, wllr, sim, config,
                               static_cast<std::size_t>(it - labels.begin()));
}

// Per class, the multiset of fake indicating words over that class's
// documents; multiplicity counts contributing documents.
class FwPool {
 public:
  FwPool() = default;
  explicit FwPool(std::vector<std::string> labels)
      : labels_(std::move(labels)), pools_(labels_.size()) {}

  void add(std::size_t label, const std::vector<std::string>& fw) {
    for (const std::string& token : fw) ++pools_[label][token];
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, std::size_t>& pool(std::size_t label) const {
    return pools_[label];
  }

  // Union of every other class's pool, multiplicities summed.
  std::map<std::string, std::size_t> others(std::size_t label) const {
    std::map<std::string, std::size_t> merged;
    for (std::size_t c = 0; c < pools_.size(); ++c) {
      if (c == label) continue;
      for (const auto& [token, n] : pools_[c]) merged[token] += n;
    }
    return merged;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::map<std::string, std::size_t>> pools_;
};

inline FwPool build_fw_pool(const LabeledCorpus& corpus,
                            const std::vector<RoleKeywords>& roles) {
  FwPool pool(corpus.labels());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    pool.add(corpus.label_index(corpus[i].label), roles[i].fw);
  }
  return pool;
}

inline FwPool build_fw_pool(const LabeledCorpus& corpus, const WllrTable& wllr,
                            const SimilarityTable& sim, const ExtractionConfig& config) {
  FwPool pool(corpus.labels());
  for (const Document& doc : corpus.documents()) {
    const std::size_t c = corpus.label_index(doc.label);
    pool.add(c, extract_role_keywords(doc, wllr, sim, config, c).fw);
  }
  return pool;
}

// Everything extraction produces for one corpus.
struct FittedKeywords {
  WllrTable wllr;
  SimilarityTable similarity;
  std::vector<RoleKeywords> roles;  // parallel to the corpus documents
  FwPool fw_pool;
};

inline FittedKeywords fit_keywords(const LabeledCorpus& corpus,
                                   const EmbeddingTable& embeddings,
                                   const ExtractionConfig& config,
                                   double epsilon = kDefaultWllrEpsilon,
                                   unsigned threads = 1) {
  config.validate();
  const ClassTokenCounts counts(corpus);
  WllrTable wllr(counts, epsilon);
  SimilarityTable sim(counts.vocabulary(), corpus.labels(), embeddings,
                      corpus.label_descriptions());
  std::vector<RoleKeywords> roles(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    roles[i] = extract_role_keywords(corpus[i], wllr, sim, config,
                                     corpus.label_index(corpus[i].label));
  });
  FwPool pool = build_fw_pool(corpus, roles);
  return {std::move(wllr), std::move(sim), std::move(roles), std::move(pool)};
}

// One JSON line per document: id, label and the cw/fw/iw token lists.
inline void write_role_keywords(std::ostream& out, const Document& doc,
                                const RoleKeywords& roles) {
  nlohmann::ordered_json record;
  record["id"] = doc.id;
  record["label"] = doc.label;
  record["cw"] = roles.cw;
  record["fw"] = roles.fw;
  record["iw"] = roles.iw;
  out << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
      << '\n';
}

}  // namespace sta
