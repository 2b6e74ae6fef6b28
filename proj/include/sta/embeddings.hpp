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

// Pre-trained word vectors: text-format loading, cosine similarity, label
// vectors and exact nearest-neighbour queries.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ranges>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sta/corpus.hpp"
#include "sta/errors.hpp"

namespace sta {

// Cosine similarity of two equally sized, non-zero vectors, clamped to [-1, 1].
template <std::ranges::contiguous_range A, std::ranges::contiguous_range B>
double cosine(const A& a, const B& b) {
  const auto n = std::ranges::size(a);
  if (n != std::ranges::size(b)) {
    throw std::invalid_argument("cosine: dimension mismatch");
  }
  const auto* pa = std::ranges::data(a);
  const auto* pb = std::ranges::data(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(pa[i]);
    const double y = static_cast<double>(pb[i]);
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// Word -> dense vector map with a fixed dimension. Vectors are stored
// contiguously as floats; norms are cached.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw DomainError("embedding dimension must be positive");
  }

  // Returns false (and keeps the existing entry) when `word` is already present.
  template <std::ranges::contiguous_range V>
  bool add(const std::string& word, const V& vector) {
    if (std::ranges::size(vector) != dimension_) {
      throw DomainError("vector for '" + word + "' has " +
                        std::to_string(std::ranges::size(vector)) +
                        " components, expected " + std::to_string(dimension_));
    }
    if (index_.contains(word)) return false;
    double squared = 0.0;
    for (auto x : vector) {
      data_.push_back(static_cast<float>(x));
      squared += static_cast<double>(static_cast<float>(x)) *
                 static_cast<double>(static_cast<float>(x));
    }
    if (squared == 0.0) {
      data_.resize(data_.size() - dimension_);
      throw DomainError("zero vector for '" + word + "'");
    }
    index_.emplace(word, words_.size());
    words_.push_back(word);
    norms_.push_back(std::sqrt(squared));
    return true;
  }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }

  bool contains(const std::string& word) const { return index_.contains(word); }

  std::optional<std::size_t> index_of(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& word(std::size_t i) const { return words_[i]; }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dimension_, dimension_};
  }
  double norm(std::size_t i) const { return norms_[i]; }

  std::optional<std::span<const float>> find(const std::string& word) const {
    if (auto i = index_of(word)) return vector(*i);
    return std::nullopt;
  }

 private:
  std::size_t dimension_;
  std::vector<std::string> words_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

inline bool parse_unsigned(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

// Reads "word v1 ... vd" lines. A first line made of exactly two integers is
// taken as a "count dim" header. Duplicate words keep their first vector.
inline EmbeddingTable read_embeddings(std::istream& in) {
  std::optional<EmbeddingTable> table;
  std::vector<float> values;
  std::string line;
  bool first = true;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      std::size_t count = 0, dim = 0;
      if (fields.size() == 2 && detail::parse_unsigned(fields[0], count) &&
          detail::parse_unsigned(fields[1], dim)) {
        if (dim == 0) throw LoadError("header declares dimension 0", line_no);
        table.emplace(dim);
        continue;
      }
    }
    if (fields.size() < 2) throw LoadError("expected a word and its vector", line_no);
    if (!table) table.emplace(fields.size() - 1);
    if (fields.size() - 1 != table->dimension()) {
      throw LoadError("expected " + std::to_string(table->dimension()) +
                          " components, found " + std::to_string(fields.size() - 1),
                      line_no);
    }
    values.assign(fields.size() - 1, 0.0f);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const std::string_view f = fields[i];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[i - 1]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw LoadError("bad vector component '" + std::string(f) + "'", line_no);
      }
    }
    try {
      table->add(std::string(fields[0]), values);
    } catch (const DomainError& e) {
      throw LoadError(e.what(), line_no);
    }
  }
  if (!table || table->size() == 0) throw LoadError("embedding file has no entries");
  return std::move(*table);
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open embedding file '" + path + "'");
  return read_embeddings(in);
}

struct LabelVector {
  std::string label;
  std::vector<double> vector;
};

// Mean vector of the in-vocabulary tokens of the label's description, or of
// the label itself (split on '_', '-' and whitespace) when it has none.
inline LabelVector label_vector(const std::string& label, const EmbeddingTable& table,
                                const std::map<std::string, std::string>& descriptions = {}) {
  std::vector<std::string> tokens;
  if (auto it = descriptions.find(label); it != descriptions.end()) {
    tokens = tokenize(it->second);
  } else {
    std::string spaced = label;
    std::replace(spaced.begin(), spaced.end(), '_', ' ');
    std::replace(spaced.begin(), spaced.end(), '-', ' ');
    tokens = tokenize(spaced);
  }
  std::vector<double> sum(table.dimension(), 0.0);
  std::size_t used = 0;
  for (const std::string& token : tokens) {
    auto v = table.find(token);
    if (!v) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++used;
  }
  if (used == 0) throw UnrepresentableLabelError(label);
  bool nonzero = false;
  for (double& x : sum) {
    x /= static_cast<double>(used);
    nonzero = nonzero || x != 0.0;
  }
  if (!nonzero) throw UnrepresentableLabelError(label);
  return {label, std::move(sum)};
}

struct Neighbor {
  std::string word;
  double similarity;
};

// Exact top-k by cosine over the whole table, excluding `word` itself.
// Ordered by similarity descending, then word ascending.
inline std::vector<Neighbor> nearest_neighbors(const std::string& word,
                                               const EmbeddingTable& table,
                                               std::size_t k) {
  if (k == 0) throw std::invalid_argument("nearest_neighbors: k must be positive");
  const auto query = table.index_of(word);
  if (!query) throw OovError(word);
  const auto qv = table.vector(*query);
  const double qn = table.norm(*query);
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i == *query) continue;
    const auto v = table.vector(i);
    double dot = 0.0;
    for (std::size_t d = 0; d < v.size(); ++d) {
      dot += static_cast<double>(qv[d]) * static_cast<double>(v[d]);
    }
    scored.emplace_back(std::clamp(dot / (qn * table.norm(i)), -1.0, 1.0), i);
  }
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), [&](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return table.word(a.second) < table.word(b.second);
                    });
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({table.word(scored[i].second), scored[i].first});
  }
  return out;
}

}  // namespace sta
