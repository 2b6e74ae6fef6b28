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

// Command-line run configuration and its flat "key = value" file format.
//
// Keys are the long flag names with '-' replaced by '_'. Blank lines and
// lines starting with '#' are ignored. Values given on the command line
// override values read from a file.

#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sta/augment.hpp"
#include "sta/errors.hpp"
#include "sta/eval.hpp"
#include "sta/keywords.hpp"
#include "sta/parallel.hpp"

namespace sta {

struct RunConfig {
  std::string input;
  std::string embeddings;
  std::string output;
  std::string test;                // eval: optional separate test corpus
  std::string label_descriptions;  // optional JSON object file

  double alpha = 0.2;
  double epsilon = kDefaultWllrEpsilon;
  std::string mode = "sta";
  std::string op = "mix";
  double proportion = 0.10;
  std::size_t factor = 6;
  std::size_t synonyms = 10;
  std::uint64_t seed = 0;
  unsigned threads = default_thread_count();

  double learning_rate = 0.1;
  std::size_t epochs = 100;
  std::size_t patience = 3;
  double validation_fraction = 0.2;
  double l2 = 1e-4;
  std::size_t batch_size = 32;

  std::vector<std::string> conditions = {"no-aug", "eda", "sta"};
  std::vector<std::size_t> sizes = {500};
  std::size_t seeds = 1;  // eval runs seeds seed, seed+1, ..., seed+seeds-1
  double test_fraction = 0.2;

  // Sets one field from its textual form; throws ConfigError on an unknown
  // key or an unparsable value.
  void set(std::string_view key, std::string_view value);

  ExtractionConfig extraction() const { return {alpha}; }
  AugmentationConfig augmentation() const;
  TrainConfig training() const;
  ExperimentConfig experiment() const;

  // Serialises every field; parse_run_config(to_text()) reproduces *this.
  std::string to_text() const;
};

namespace detail {

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("bad value '" + std::string(value) + "' for '" + std::string(key) + "'");
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    auto comma = value.find(',', pos);
    if (comma == std::string_view::npos) comma = value.size();
    const auto item = trim(value.substr(pos, comma - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

template <class T>
std::string join_list(const std::vector<T>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << ',';
    out << items[i];
  }
  return out.str();
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline void RunConfig::set(std::string_view raw_key, std::string_view raw_value) {
  std::string key(detail::trim(raw_key));
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  const std::string_view value = detail::trim(raw_value);
  using detail::parse_number;
  if (key == "input") input = value;
  else if (key == "embeddings") embeddings = value;
  else if (key == "output") output = value;
  else if (key == "test") test = value;
  else if (key == "label_descriptions") label_descriptions = value;
  else if (key == "alpha") alpha = parse_number<double>(key, value);
  else if (key == "epsilon") epsilon = parse_number<double>(key, value);
  else if (key == "mode") {
    if (!parse_mode(value)) throw ConfigError("mode must be 'sta' or 'eda'");
    mode = value;
  } else if (key == "operator") {
    if (value != "mix" && !parse_operator(value)) {
      throw ConfigError("unknown operator '" + std::string(value) + "'");
    }
    op = value;
  } else if (key == "proportion") proportion = parse_number<double>(key, value);
  else if (key == "factor") factor = parse_number<std::size_t>(key, value);
  else if (key == "synonyms") synonyms = parse_number<std::size_t>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "threads") threads = parse_number<unsigned>(key, value);
  else if (key == "learning_rate") learning_rate = parse_number<double>(key, value);
  else if (key == "epochs") epochs = parse_number<std::size_t>(key, value);
  else if (key == "patience") patience = parse_number<std::size_t>(key, value);
  else if (key == "validation_fraction") validation_fraction = parse_number<double>(key, value);
  else if (key == "l2") l2 = parse_number<double>(key, value);
  else if (key == "batch_size") batch_size = parse_number<std::size_t>(key, value);
  else if (key == "conditions") {
    conditions = detail::split_list(value);
    for (const auto& c : conditions) parse_condition(c, 1);
  } else if (key == "sizes") {
    sizes.clear();
    for (const auto& s : detail::split_list(value)) {
      sizes.push_back(parse_number<std::size_t>(key, s));
    }
  } else if (key == "seeds") seeds = parse_number<std::size_t>(key, value);
  else if (key == "test_fraction") test_fraction = parse_number<double>(key, value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

inline AugmentationConfig RunConfig::augmentation() const {
  AugmentationConfig out;
  out.edit_proportion = proportion;
  out.alpha = alpha;
  out.augment_factor = factor;
  out.synonym_pool_k = synonyms;
  out.seed = seed;
  const auto m = parse_mode(mode);
  if (!m) throw ConfigError("mode must be 'sta' or 'eda'");
  out.operators = resolve_operators(*m, op, factor);
  out.validate();
  return out;
}

inline TrainConfig RunConfig::training() const {
  TrainConfig out;
  out.learning_rate = learning_rate;
  out.max_epochs = epochs;
  out.patience = patience;
  out.validation_fraction = validation_fraction;
  out.seed = seed;
  out.l2 = l2;
  out.batch_size = batch_size;
  out.validate();
  return out;
}

inline ExperimentConfig RunConfig::experiment() const {
  ExperimentConfig out;
  out.conditions = conditions;
  out.sizes = sizes;
  out.seeds.clear();
  for (std::size_t i = 0; i < seeds; ++i) out.seeds.push_back(seed + i);
  out.test_fraction = test_fraction;
  out.split_seed = seed;
  out.epsilon = epsilon;
  out.augmentation = augmentation();
  out.training = training();
  out.threads = threads;
  return out;
}

inline std::string RunConfig::to_text() const {
  using detail::format_double;
  std::ostringstream out;
  out << "input = " << input << '\n'
      << "embeddings = " << embeddings << '\n'
      << "output = " << output << '\n'
      << "test = " << test << '\n'
      << "label_descriptions = " << label_descriptions << '\n'
      << "alpha = " << format_double(alpha) << '\n'
      << "epsilon = " << format_double(epsilon) << '\n'
      << "mode = " << mode << '\n'
      << "operator = " << op << '\n'
      << "proportion = " << format_double(proportion) << '\n'
      << "factor = " << factor << '\n'
      << "synonyms = " << synonyms << '\n'
      << "seed = " << seed << '\n'
      << "threads = " << threads << '\n'
      << "learning_rate = " << format_double(learning_rate) << '\n'
      << "epochs = " << epochs << '\n'
      << "patience = " << patience << '\n'
      << "validation_fraction = " << format_double(validation_fraction) << '\n'
      << "l2 = " << format_double(l2) << '\n'
      << "batch_size = " << batch_size << '\n'
      << "conditions = " << detail::join_list(conditions) << '\n'
      << "sizes = " << detail::join_list(sizes) << '\n'
      << "seeds = " << seeds << '\n'
      << "test_fraction = " << format_double(test_fraction) << '\n';
  return out.str();
}

// Applies every "key = value" line of `in` on top of `base`.
inline RunConfig parse_run_config(std::istream& in, RunConfig base = {}) {
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      base.set(text.substr(0, eq), text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

inline RunConfig load_run_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_run_config(in, std::move(base));
}

}  // namespace sta
