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

// Labeled corpora: tokenization, JSONL I/O, per-class token statistics and
// stratified splitting.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sta/errors.hpp"
#include "sta/random.hpp"

namespace sta {

namespace detail {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

// Decodes the UTF-8 sequence starting at `pos`. Malformed bytes decode as
// themselves with length 1.
inline CodePoint decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) {
    return pos + i < s.size() &&
           (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t i) {
    return static_cast<char32_t>(static_cast<unsigned char>(s[pos + i]) & 0x3F);
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    return {(static_cast<char32_t>(b0 & 0x1F) << 6) | bits(1), 2};
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    return {(static_cast<char32_t>(b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2),
            3};
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    return {(static_cast<char32_t>(b0 & 0x07) << 18) | (bits(1) << 12) |
                (bits(2) << 6) | bits(3),
            4};
  }
  return {b0, 1};
}

// Start offset of the code point that ends at `end` (exclusive).
inline std::size_t last_code_point_start(std::string_view s, std::size_t end) {
  std::size_t start = end - 1;
  while (start > 0 && end - start < 4 &&
         (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) {
    --start;
  }
  if (decode_utf8(s, start).length != end - start) return end - 1;
  return start;
}

inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' ||
         c == U'\f' || c == 0x00A0 || c == 0x3000;
}

inline bool is_punctuation(char32_t c) {
  if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
  return c == 0x00A1 || c == 0x00A7 || c == 0x00AB || c == 0x00B6 ||
         c == 0x00B7 || c == 0x00BB || c == 0x00BF ||
         (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         (c >= 0x3014 && c <= 0x301F) || (c >= 0xFF01 && c <= 0xFF0F) ||
         (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
         (c >= 0xFF5B && c <= 0xFF65);
}

inline std::string_view strip_punctuation(std::string_view piece) {
  std::size_t begin = 0;
  std::size_t end = piece.size();
  while (begin < end) {
    const CodePoint cp = decode_utf8(piece, begin);
    if (!is_punctuation(cp.value)) break;
    begin += cp.length;
  }
  while (end > begin) {
    const std::size_t start = last_code_point_start(piece, end);
    if (!is_punctuation(decode_utf8(piece, start).value)) break;
    end = start;
  }
  return piece.substr(begin, end - begin);
}

}  // namespace detail

// Lowercases (ASCII), splits on whitespace, strips leading and trailing
// punctuation from each piece and drops pieces that end up empty.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  auto flush = [&](std::size_t begin, std::size_t end) {
    const std::string_view piece =
        detail::strip_punctuation(text.substr(begin, end - begin));
    if (piece.empty()) return;
    std::string token(piece);
    for (char& c : token) {
      if (static_cast<unsigned char>(c) < 0x80) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    tokens.push_back(std::move(token));
  };
  std::size_t piece_begin = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const detail::CodePoint cp = detail::decode_utf8(text, pos);
    if (detail::is_space(cp.value)) {
      if (pos > piece_begin) flush(piece_begin, pos);
      piece_begin = pos + cp.length;
    }
    pos += cp.length;
  }
  if (pos > piece_begin) flush(piece_begin, pos);
  return tokens;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

struct Document {
  std::string id;
  std::vector<std::string> tokens;
  std::string label;
};

// An immutable set of labeled documents over at least two labels. Labels
// are kept sorted so that label indices are stable across subsets that
// share the same label set.
class LabeledCorpus {
 public:
  // Label set inferred from the documents.
  explicit LabeledCorpus(std::vector<Document> documents,
                         std::map<std::string, std::string> descriptions = {})
      : documents_(std::move(documents)),
        labels_(infer_labels(documents_)),
        descriptions_(std::move(descriptions)) {
    validate();
  }

  LabeledCorpus(std::vector<Document> documents, std::vector<std::string> labels,
                std::map<std::string, std::string> descriptions = {})
      : documents_(std::move(documents)),
        labels_(std::move(labels)),
        descriptions_(std::move(descriptions)) {
    validate();
  }

  const std::vector<Document>& documents() const { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, std::string>& label_descriptions() const {
    return descriptions_;
  }

  std::size_t label_index(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw CorpusError("unknown label '" + label + "'");
    return it->second;
  }

  // Same labels and descriptions, different documents.
  LabeledCorpus with_documents(std::vector<Document> documents) const {
    return LabeledCorpus(std::move(documents), labels_, descriptions_);
  }

 private:
  void validate() {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    if (labels_.size() < 2) {
      throw CorpusError("corpus needs at least 2 distinct labels, found " +
                        std::to_string(labels_.size()));
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], i);
    for (const Document& doc : documents_) {
      if (doc.tokens.empty()) {
        throw CorpusError("document '" + doc.id + "' has no tokens");
      }
      if (!index_.contains(doc.label)) {
        throw CorpusError("document '" + doc.id + "' has unknown label '" +
                          doc.label + "'");
      }
    }
  }

  static std::vector<std::string> infer_labels(
      const std::vector<Document>& documents) {
    std::set<std::string> labels;
    for (const Document& doc : documents) labels.insert(doc.label);
    return {labels.begin(), labels.end()};
  }

  std::vector<Document> documents_;
  std::vector<std::string> labels_;
  std::map<std::string, std::string> descriptions_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadedCorpus {
  LabeledCorpus corpus;
  std::size_t skipped_empty = 0;  // documents dropped for tokenizing to nothing
};

// Reads JSONL with string fields "text" and "label" and optional "id".
// Missing ids become the 0-based line number. Blank lines are ignored.
inline LoadedCorpus read_corpus(std::istream& in,
                                std::map<std::string, std::string> descriptions = {}) {
  std::vector<Document> documents;
  std::size_t skipped = 0;
  std::string line;
  for (std::size_t line_no = 0; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LoadError(std::string("malformed JSON: ") + e.what(), line_no + 1);
    }
    if (!record.is_object()) throw LoadError("expected a JSON object", line_no + 1);
    auto text = record.find("text");
    auto label = record.find("label");
    if (text == record.end() || !text->is_string()) {
      throw LoadError("missing string field \"text\"", line_no + 1);
    }
    if (label == record.end() || !label->is_string()) {
      throw LoadError("missing string field \"label\"", line_no + 1);
    }
    Document doc;
    if (auto id = record.find("id"); id != record.end()) {
      if (!id->is_string()) throw LoadError("field \"id\" must be a string", line_no + 1);
      doc.id = id->get<std::string>();
    } else {
      doc.id = std::to_string(line_no);
    }
    doc.tokens = tokenize(text->get<std::string>());
    doc.label = label->get<std::string>();
    if (doc.tokens.empty()) {
      ++skipped;
      continue;
    }
    documents.push_back(std::move(doc));
  }
  return {LabeledCorpus(std::move(documents), std::move(descriptions)), skipped};
}

inline LoadedCorpus load_corpus(const std::string& path,
                                std::map<std::string, std::string> descriptions = {}) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open corpus file '" + path + "'");
  return read_corpus(in, std::move(descriptions));
}

// Label descriptions file: a single JSON object mapping label to text.
inline std::map<std::string, std::string> load_label_descriptions(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open label description file '" + path + "'");
  nlohmann::json object;
  try {
    object = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(std::string("malformed label descriptions: ") + e.what());
  }
  if (!object.is_object()) throw LoadError("label descriptions must be a JSON object");
  std::map<std::string, std::string> out;
  for (auto& [label, text] : object.items()) {
    if (!text.is_string()) throw LoadError("description of '" + label + "' is not a string");
    out.emplace(label, text.get<std::string>());
  }
  return out;
}

inline void write_document(std::ostream& out, const Document& doc) {
  nlohmann::ordered_json record;
  record["id"] = doc.id;
  record["text"] = join_tokens(doc.tokens);
  record["label"] = doc.label;
  out << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
      << '\n';
}

inline void write_corpus(std::ostream& out, const LabeledCorpus& corpus) {
  for (const Document& doc : corpus.documents()) write_document(out, doc);
}

// Token occurrence counts per class (token frequency, not document frequency).
class ClassTokenCounts {
 public:
  explicit ClassTokenCounts(const LabeledCorpus& corpus)
      : labels_(corpus.labels()),
        counts_(labels_.size()),
        totals_(labels_.size(), 0) {
    std::set<std::string> vocabulary;
    for (const Document& doc : corpus.documents()) {
      const std::size_t c = corpus.label_index(doc.label);
      for (const std::string& token : doc.tokens) {
        ++counts_[c][token];
        ++totals_[c];
        vocabulary.insert(token);
      }
    }
    vocabulary_.assign(vocabulary.begin(), vocabulary.end());
  }

  const std::vector<std::string>& labels() const { return labels_; }
  // Sorted distinct tokens.
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  std::uint64_t count(std::size_t label, const std::string& token) const {
    auto it = counts_[label].find(token);
    return it == counts_[label].end() ? 0 : it->second;
  }
  std::uint64_t total(std::size_t label) const { return totals_[label]; }
  const std::unordered_map<std::string, std::uint64_t>& counts(std::size_t label) const {
    return counts_[label];
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::unordered_map<std::string, std::uint64_t>> counts_;
  std::vector<std::uint64_t> totals_;
  std::vector<std::string> vocabulary_;
};

inline ClassTokenCounts class_token_counts(const LabeledCorpus& corpus) {
  return ClassTokenCounts(corpus);
}

namespace detail {

inline std::vector<std::vector<std::size_t>> indices_by_label(
    const LabeledCorpus& corpus) {
  std::vector<std::vector<std::size_t>> by_label(corpus.labels().size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_label[corpus.label_index(corpus[i].label)].push_back(i);
  }
  return by_label;
}

inline std::vector<Document> gather(const LabeledCorpus& corpus,
                                    const std::vector<std::size_t>& indices) {
  std::vector<Document> docs;
  docs.reserve(indices.size());
  for (std::size_t i : indices) docs.push_back(corpus[i]);
  return docs;
}

}  // namespace detail

// Stratified shuffle split. Each class keeps round(fraction * size) documents
// for the first part, clamped so both parts receive at least one.
inline std::pair<LabeledCorpus, LabeledCorpus> split(const LabeledCorpus& corpus,
                                                     double train_fraction,
                                                     std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  auto by_label = detail::indices_by_label(corpus);
  for (std::size_t c = 0; c < by_label.size(); ++c) {
    auto& members = by_label[c];
    if (members.size() < 2) {
      throw CorpusError("cannot split: label '" + corpus.labels()[c] + "' has " +
                        std::to_string(members.size()) + " document(s), need 2");
    }
    rng.shuffle(members);
    auto n_train = static_cast<std::size_t>(
        std::lround(train_fraction * static_cast<double>(members.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    train.insert(train.end(), members.begin(), members.begin() + n_train);
    test.insert(test.end(), members.begin() + n_train, members.end());
  }
  rng.shuffle(train);
  rng.shuffle(test);
  return {corpus.with_documents(detail::gather(corpus, train)),
          corpus.with_documents(detail::gather(corpus, test))};
}

// Draws `size` documents with per-class quotas proportional to class sizes
// (largest remainder, every class at least one).
inline LabeledCorpus stratified_sample(const LabeledCorpus& corpus, std::size_t size,
                                       std::uint64_t seed) {
  if (size > corpus.size()) {
    throw CorpusError("requested " + std::to_string(size) + " documents but only " +
                      std::to_string(corpus.size()) + " are available");
  }
  auto by_label = detail::indices_by_label(corpus);
  const std::size_t k = by_label.size();
  if (size < k) {
    throw CorpusError("sample size " + std::to_string(size) +
                      " is smaller than the number of labels");
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (by_label[c].empty()) {
      throw CorpusError("label '" + corpus.labels()[c] + "' has no documents");
    }
  }
  std::vector<std::size_t> quota(k);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = static_cast<double>(size) *
                         static_cast<double>(by_label[c].size()) /
                         static_cast<double>(corpus.size());
    quota[c] = std::clamp<std::size_t>(static_cast<std::size_t>(exact), 1,
                                       by_label[c].size());
    assigned += quota[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  while (assigned < size) {
    bool progressed = false;
    for (const auto& [rem, c] : remainders) {
      if (assigned == size) break;
      if (quota[c] < by_label[c].size()) {
        ++quota[c];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  while (assigned > size) {
    // Only reachable when the minimum-one rule overshoots; trim the largest.
    auto c = static_cast<std::size_t>(
        std::max_element(quota.begin(), quota.end()) - quota.begin());
    --quota[c];
    --assigned;
  }
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < k; ++c) {
    auto picked = rng.sample_from(by_label[c], quota[c]);
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }
  rng.shuffle(chosen);
  return corpus.with_documents(detail::gather(corpus, chosen));
}

}  // namespace sta
