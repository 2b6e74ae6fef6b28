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

// Classification harness: bag-of-words features, multinomial logistic
// regression trained by mini-batch SGD with early stopping, and the
// no-augmentation / EDA / STA experiment runner.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sta/augment.hpp"
#include "sta/corpus.hpp"
#include "sta/embeddings.hpp"
#include "sta/errors.hpp"
#include "sta/keywords.hpp"
#include "sta/parallel.hpp"
#include "sta/random.hpp"

namespace sta {

// One training example. `group` identifies the original document it came
// from; augmented copies share their parent's group.
struct Example {
  std::vector<std::string> tokens;
  std::size_t label = 0;
  std::size_t group = 0;
  bool original = true;
};

inline std::vector<Example> examples_from(const LabeledCorpus& corpus) {
  std::vector<Example> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    out.push_back({corpus[i].tokens, corpus.label_index(corpus[i].label), i, true});
  }
  return out;
}

// Expects augment_corpus layout: every original precedes its augmentations.
inline std::vector<Example> examples_from(const std::vector<AugmentedSample>& samples,
                                          const LabeledCorpus& corpus) {
  std::vector<Example> out;
  out.reserve(samples.size());
  std::size_t group = 0;
  bool seen_original = false;
  for (const AugmentedSample& s : samples) {
    const bool original = !s.op.has_value();
    if (original) {
      if (seen_original) ++group;
      seen_original = true;
    }
    out.push_back({s.tokens, corpus.label_index(s.label), group, original});
  }
  return out;
}

class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(const std::vector<Example>& examples) {
    std::set<std::string> tokens;
    for (const Example& e : examples) tokens.insert(e.tokens.begin(), e.tokens.end());
    for (const std::string& t : tokens) add(t);
  }

  void add(const std::string& token) {
    if (index_.try_emplace(token, words_.size()).second) words_.push_back(token);
  }
  std::optional<std::size_t> index(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const std::string& token) const { return index_.contains(token); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Sparse token counts, sorted by feature index.
struct BowVector {
  std::vector<std::pair<std::size_t, double>> entries;
};

inline BowVector featurize(const std::vector<std::string>& tokens, const Vocab& vocab) {
  std::map<std::size_t, double> counts;
  for (const std::string& t : tokens) {
    if (auto i = vocab.index(t)) counts[*i] += 1.0;
  }
  return {{counts.begin(), counts.end()}};
}

struct LinearModel {
  std::size_t classes = 0;
  std::size_t features = 0;
  std::vector<double> weights;  // row-major: class x feature
  std::vector<double> bias;

  LinearModel() = default;
  LinearModel(std::size_t num_classes, std::size_t num_features)
      : classes(num_classes),
        features(num_features),
        weights(num_classes * num_features, 0.0),
        bias(num_classes, 0.0) {}

  std::vector<double> scores(const BowVector& x) const {
    std::vector<double> s = bias;
    for (std::size_t c = 0; c < classes; ++c) {
      const double* row = weights.data() + c * features;
      for (const auto& [j, v] : x.entries) s[c] += row[j] * v;
    }
    return s;
  }

  bool operator==(const LinearModel&) const = default;
};

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probabilities;
};

inline std::vector<double> softmax(std::vector<double> s) {
  const double top = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double& v : s) {
    v = std::exp(v - top);
    z += v;
  }
  for (double& v : s) v /= z;
  return s;
}

// Softmax over class scores; ties in the argmax go to the lowest index.
inline Prediction predict(const LinearModel& model, const BowVector& x) {
  Prediction p;
  p.probabilities = softmax(model.scores(x));
  p.label = static_cast<std::size_t>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) -
      p.probabilities.begin());
  return p;
}

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t max_epochs = 100;
  std::size_t patience = 3;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
  double l2 = 1e-4;
  std::size_t batch_size = 32;

  void validate() const {
    if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
    if (max_epochs == 0) throw ConfigError("epoch cap must be positive");
    if (patience == 0) throw ConfigError("patience must be positive");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
      throw ConfigError("validation fraction must lie in [0, 1)");
    }
    if (!(l2 >= 0.0)) throw ConfigError("l2 must be non-negative");
    if (batch_size == 0) throw ConfigError("batch size must be positive");
  }
};

struct Classifier {
  Vocab vocab;
  LinearModel model;

  Prediction predict(const std::vector<std::string>& tokens) const {
    return sta::predict(model, featurize(tokens, vocab));
  }
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_accuracy = 0.0;
};

struct TrainResult {
  Classifier classifier;
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  double initial_train_loss = 0.0;
  std::size_t training_size = 0;
  std::size_t validation_size = 0;
};

namespace detail {

struct Featurized {
  BowVector x;
  std::size_t label;
};

inline double mean_cross_entropy(const LinearModel& model,
                                 const std::vector<Featurized>& data,
                                 const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  double loss = 0.0;
  for (std::size_t r : rows) {
    const auto p = softmax(model.scores(data[r].x));
    loss -= std::log(std::max(p[data[r].label], 1e-300));
  }
  return loss / static_cast<double>(rows.size());
}

inline double accuracy_on(const LinearModel& model, const std::vector<Featurized>& data,
                          const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r : rows) hits += predict(model, data[r].x).label == data[r].label;
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

// Stratified hold-out of original examples. Every group with a held-out
// original leaves training entirely, augmentations included.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout(
    const std::vector<Example>& examples, std::size_t num_classes, double fraction,
    Rng& rng) {
  std::vector<std::vector<std::size_t>> originals(num_classes);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].original) originals[examples[i].label].push_back(i);
  }
  std::unordered_set<std::size_t> held_groups;
  std::vector<std::size_t> validation;
  for (auto& members : originals) {
    if (members.size() < 2 || fraction <= 0.0) continue;
    rng.shuffle(members);
    auto take = static_cast<std::size_t>(
        std::lround(fraction * static_cast<double>(members.size())));
    take = std::min(take, members.size() - 1);
    for (std::size_t i = 0; i < take; ++i) {
      validation.push_back(members[i]);
      held_groups.insert(examples[members[i]].group);
    }
  }
  std::sort(validation.begin(), validation.end());
  std::vector<std::size_t> training;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!held_groups.contains(examples[i].group)) training.push_back(i);
  }
  return {std::move(training), std::move(validation)};
}

}  // namespace detail

// Mini-batch SGD on L2-regularised cross-entropy, starting from zero weights.
// After each epoch the model is scored on a held-out set of original examples;
// training stops after `patience` epochs without improvement and the best
// epoch's parameters are returned. With no held-out set, training accuracy
// drives the selection instead.
inline TrainResult train(const std::vector<Example>& examples, std::size_t num_classes,
                         const TrainConfig& config) {
  config.validate();
  if (examples.empty()) throw DomainError("cannot train on an empty training set");
  std::set<std::size_t> present;
  for (const Example& e : examples) {
    if (e.label >= num_classes) throw DomainError("example label out of range");
    present.insert(e.label);
  }
  if (present.size() < 2) throw DomainError("training set must contain at least two classes");

  Rng rng(config.seed);
  auto [training, validation] =
      detail::holdout(examples, num_classes, config.validation_fraction, rng);

  TrainResult result;
  result.classifier.vocab = Vocab(examples);
  const Vocab& vocab = result.classifier.vocab;
  std::vector<detail::Featurized> data;
  data.reserve(examples.size());
  for (const Example& e : examples) data.push_back({featurize(e.tokens, vocab), e.label});

  LinearModel model(num_classes, vocab.size());
  const std::vector<std::size_t>& selection_rows = validation.empty() ? training : validation;
  result.training_size = training.size();
  result.validation_size = validation.size();
  result.initial_train_loss = detail::mean_cross_entropy(model, data, training);
  result.classifier.model = model;

  const double lr = config.learning_rate;
  double best_accuracy = -1.0;
  std::size_t stale = 0;
  std::vector<std::size_t> order = training;
  std::vector<std::vector<double>> residuals;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = lr / static_cast<double>(end - start);
      residuals.clear();
      for (std::size_t b = start; b < end; ++b) {
        auto p = softmax(model.scores(data[order[b]].x));
        p[data[order[b]].label] -= 1.0;
        residuals.push_back(std::move(p));
      }
      if (config.l2 > 0.0 && lr > 0.0) {
        const double decay = 1.0 - lr * config.l2;
        for (double& w : model.weights) w *= decay;
      }
      for (std::size_t b = start; b < end; ++b) {
        const auto& g = residuals[b - start];
        const BowVector& x = data[order[b]].x;
        for (std::size_t c = 0; c < num_classes; ++c) {
          double* row = model.weights.data() + c * model.features;
          for (const auto& [j, v] : x.entries) row[j] -= scale * g[c] * v;
          model.bias[c] -= scale * g[c];
        }
      }
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = detail::mean_cross_entropy(model, data, training);
    stats.validation_accuracy = detail::accuracy_on(model, data, selection_rows);
    result.history.push_back(stats);
    if (stats.validation_accuracy > best_accuracy) {
      best_accuracy = stats.validation_accuracy;
      result.best_epoch = epoch;
      result.classifier.model = model;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

inline double accuracy(const Classifier& classifier, const LabeledCorpus& test) {
  if (test.empty()) throw CorpusError("test set is empty");
  std::size_t hits = 0;
  for (const Document& doc : test.documents()) {
    hits += classifier.predict(doc.tokens).label == test.label_index(doc.label);
  }
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

// ---------------------------------------------------------------------------
// Experiments

struct Condition {
  std::string name;
  std::vector<Operator> operators;  // empty: no augmentation
};

// "no-aug", "eda", "sta", "<operator>" (repeated `default_factor` times) or
// "<operator>:<factor>".
inline Condition parse_condition(std::string_view spec, std::size_t default_factor) {
  if (spec == "no-aug" || spec == "none") return {"no-aug", {}};
  if (spec == "eda") return {"eda", mix_operators(Mode::kEda)};
  if (spec == "sta") return {"sta", mix_operators(Mode::kSta)};
  std::string_view name = spec;
  std::size_t factor = default_factor;
  if (auto colon = spec.find(':'); colon != std::string_view::npos) {
    name = spec.substr(0, colon);
    const std::string_view digits = spec.substr(colon + 1);
    if (!detail::parse_unsigned(digits, factor) || factor == 0) {
      throw ConfigError("bad augment factor in condition '" + std::string(spec) + "'");
    }
  }
  auto op = parse_operator(name);
  if (!op) throw ConfigError("unknown condition '" + std::string(spec) + "'");
  return {std::string(spec), std::vector<Operator>(factor, *op)};
}

struct ExperimentConfig {
  std::vector<std::string> conditions = {"no-aug", "eda", "sta"};
  std::vector<std::size_t> sizes = {500};
  std::vector<std::uint64_t> seeds = {0};
  double test_fraction = 0.2;  // only used when no explicit test set is given
  std::uint64_t split_seed = 0;
  double epsilon = kDefaultWllrEpsilon;
  AugmentationConfig augmentation;  // operators are taken from each condition
  TrainConfig training;             // seed is derived per cell
  unsigned threads = 1;
};

// Streams used by one (size, seed) cell; shared by all its conditions so
// that conditions are compared on the same training subsample.
struct CellSeeds {
  std::uint64_t subsample;
  std::uint64_t augment;
  std::uint64_t train;
};

inline CellSeeds cell_seeds(std::uint64_t seed, std::size_t size) {
  return {derive_seed(seed, "subsample", size), derive_seed(seed, "augment", size),
          derive_seed(seed, "train", size)};
}

struct CellResult {
  std::string condition;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  std::size_t train_examples = 0;
  std::size_t epochs = 0;
};

struct ConditionSummary {
  std::string condition;
  std::size_t size = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single seed
  std::vector<double> per_seed;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  std::vector<ConditionSummary> summaries;

  const ConditionSummary* find(std::string_view condition, std::size_t size) const {
    for (const auto& s : summaries) {
      if (s.condition == condition && s.size == size) return &s;
    }
    return nullptr;
  }
};

// Groups cells by (size, condition) in order of first appearance.
inline std::vector<ConditionSummary> summarize(const std::vector<CellResult>& cells) {
  std::vector<ConditionSummary> out;
  for (const CellResult& cell : cells) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ConditionSummary& s) {
      return s.condition == cell.condition && s.size == cell.size;
    });
    if (it == out.end()) {
      out.push_back({cell.condition, cell.size, 0.0, 0.0, {}});
      it = out.end() - 1;
    }
    it->per_seed.push_back(cell.accuracy);
  }
  for (ConditionSummary& s : out) {
    double sum = 0.0;
    for (double a : s.per_seed) sum += a;
    s.mean = sum / static_cast<double>(s.per_seed.size());
    if (s.per_seed.size() > 1) {
      double sq = 0.0;
      for (double a : s.per_seed) sq += (a - s.mean) * (a - s.mean);
      s.stddev = std::sqrt(sq / static_cast<double>(s.per_seed.size() - 1));
    }
  }
  return out;
}

// Training examples for one condition: the sample itself, or the sample
// plus its augmentations. `keywords` must be fitted on `sample` whenever the
// condition augments.
inline std::vector<Example> training_examples(const LabeledCorpus& sample,
                                              const Condition& condition,
                                              const FittedKeywords* keywords,
                                              const SynonymSource& synonyms,
                                              AugmentationConfig augmentation,
                                              std::uint64_t seed) {
  if (condition.operators.empty()) return examples_from(sample);
  if (keywords == nullptr) throw ConfigError("augmenting condition needs fitted keywords");
  augmentation.operators = condition.operators;
  augmentation.seed = seed;
  return examples_from(augment_corpus(sample, *keywords, synonyms, augmentation), sample);
}

// Runs every (size, seed) cell against the shared test set. Extraction
// tables, FW pools and the classifier vocabulary are fitted on the cell's
// training subsample only.
inline ExperimentReport run_experiment(const LabeledCorpus& pool, const LabeledCorpus& test,
                                       const EmbeddingTable& embeddings,
                                       const ExperimentConfig& config) {
  if (pool.labels() != test.labels()) {
    throw CorpusError("training pool and test set have different label sets");
  }
  config.augmentation.validate();
  config.training.validate();
  std::vector<Condition> conditions;
  for (const std::string& spec : config.conditions) {
    conditions.push_back(parse_condition(spec, config.augmentation.augment_factor));
  }
  if (conditions.empty() || config.sizes.empty() || config.seeds.empty()) {
    throw ConfigError("experiment needs at least one condition, size and seed");
  }
  for (std::size_t size : config.sizes) {
    if (size > pool.size()) {
      throw CorpusError("train size " + std::to_string(size) + " exceeds the " +
                        std::to_string(pool.size()) + " available documents");
    }
  }
  const SynonymSource synonyms(embeddings, config.augmentation.synonym_pool_k);
  const std::size_t k = pool.labels().size();

  struct Task {
    std::size_t size;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t size : config.sizes) {
    for (std::uint64_t seed : config.seeds) tasks.push_back({size, seed});
  }
  std::vector<std::vector<CellResult>> results(tasks.size());
  parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
    const auto [size, seed] = tasks[t];
    const CellSeeds seeds = cell_seeds(seed, size);
    const LabeledCorpus sample = stratified_sample(pool, size, seeds.subsample);
    std::optional<FittedKeywords> keywords;
    for (const Condition& condition : conditions) {
      if (!condition.operators.empty() && !keywords) {
        keywords = fit_keywords(sample, embeddings,
                                ExtractionConfig{config.augmentation.alpha}, config.epsilon);
      }
      const auto examples = training_examples(sample, condition, keywords ? &*keywords : nullptr,
                                              synonyms, config.augmentation, seeds.augment);
      TrainConfig training = config.training;
      training.seed = seeds.train;
      const TrainResult trained = train(examples, k, training);
      results[t].push_back({condition.name, size, seed, accuracy(trained.classifier, test),
                            examples.size(), trained.history.size()});
    }
  });

  ExperimentReport report;
  for (std::size_t size : config.sizes) {
    for (const Condition& condition : conditions) {
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (tasks[t].size != size) continue;
        for (const CellResult& cell : results[t]) {
          if (cell.condition == condition.name) report.cells.push_back(cell);
        }
      }
    }
  }
  report.summaries = summarize(report.cells);
  return report;
}

// Carves a fixed stratified test split from `corpus`, shared by every cell.
inline ExperimentReport run_experiment(const LabeledCorpus& corpus,
                                       const EmbeddingTable& embeddings,
                                       const ExperimentConfig& config) {
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  auto [pool, test] = split(corpus, 1.0 - config.test_fraction, config.split_seed);
  return run_experiment(pool, test, embeddings, config);
}

inline nlohmann::ordered_json to_json(const ExperimentReport& report) {
  nlohmann::ordered_json out;
  out["cells"] = nlohmann::ordered_json::array();
  for (const CellResult& c : report.cells) {
    nlohmann::ordered_json cell;
    cell["condition"] = c.condition;
    cell["size"] = c.size;
    cell["seed"] = c.seed;
    cell["accuracy"] = c.accuracy;
    cell["train_examples"] = c.train_examples;
    cell["epochs"] = c.epochs;
    out["cells"].push_back(std::move(cell));
  }
  out["summaries"] = nlohmann::ordered_json::array();
  for (const ConditionSummary& s : report.summaries) {
    nlohmann::ordered_json summary;
    summary["condition"] = s.condition;
    summary["size"] = s.size;
    summary["mean"] = s.mean;
    summary["std"] = s.stddev;
    summary["per_seed"] = s.per_seed;
    out["summaries"].push_back(std::move(summary));
  }
  return out;
}

// Summaries are recomputed from the cells rather than trusted from the file.
inline ExperimentReport report_from_json(const nlohmann::json& json) {
  ExperimentReport report;
  try {
    for (const auto& c : json.at("cells")) {
      CellResult cell;
      cell.condition = c.at("condition").get<std::string>();
      cell.size = c.at("size").get<std::size_t>();
      cell.seed = c.at("seed").get<std::uint64_t>();
      cell.accuracy = c.at("accuracy").get<double>();
      cell.train_examples = c.value("train_examples", std::size_t{0});
      cell.epochs = c.value("epochs", std::size_t{0});
      if (!(cell.accuracy >= 0.0 && cell.accuracy <= 1.0)) {
        throw LoadError("accuracy outside [0, 1] in report");
      }
      report.cells.push_back(std::move(cell));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed report: ") + e.what());
  }
  report.summaries = summarize(report.cells);
  return report;
}

// Aligned plain-text table: condition, size, mean, std, per-seed values.
inline std::string render_table(const ExperimentReport& report) {
  auto fixed = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << v;
    return s.str();
  };
  std::vector<std::array<std::string, 5>> rows;
  rows.push_back({"condition", "size", "mean", "std", "per-seed"});
  for (const ConditionSummary& s : report.summaries) {
    std::string seeds;
    for (std::size_t i = 0; i < s.per_seed.size(); ++i) {
      if (i) seeds += ' ';
      seeds += fixed(s.per_seed[i]);
    }
    rows.push_back({s.condition, std::to_string(s.size), fixed(s.mean), fixed(s.stddev),
                    seeds});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string cell = row[i];
      if (i + 1 < row.size()) cell.resize(width[i], ' ');
      line += cell;
      if (i + 1 < row.size()) line += "  ";
    }
    out << line << '\n';
  }
  return out.str();
}

}  // namespace sta
