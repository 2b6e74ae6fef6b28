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

// sta: extract role keywords, augment corpora and run classification
// experiments.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sta/sta.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct FlagSpec {
  const char* name;  // long flag without dashes
  const char* help;
};

const std::vector<FlagSpec> kShared = {
    {"input", "input file"},
    {"embeddings", "word vectors in text format"},
    {"config", "flat 'key = value' config file; flags take precedence"},
    {"seed", "random seed"},
    {"threads", "worker threads"},
    {"output", "output file (default: standard output)"},
};

const std::vector<FlagSpec> kExtraction = {
    {"alpha", "top-word ratio for role keyword extraction (default 0.2)"},
    {"epsilon", "WLLR smoothing constant (default 1e-6)"},
    {"label-descriptions", "JSON object mapping labels to descriptions"},
};

const std::vector<FlagSpec> kAugmentation = {
    {"mode", "sta or eda (default sta)"},
    {"operator", "operator name or 'mix' (default mix)"},
    {"proportion", "edit proportion (default 0.1)"},
    {"factor", "samples per document for a single operator (default 6)"},
    {"synonyms", "nearest-neighbour pool size for synonyms (default 10)"},
};

const std::vector<FlagSpec> kEvaluation = {
    {"test", "separate test corpus (default: carve from --input)"},
    {"conditions", "comma-separated: no-aug, eda, sta, <operator>[:factor]"},
    {"sizes", "comma-separated training set sizes (default 500)"},
    {"seeds", "number of seeds per cell (default 1)"},
    {"test-fraction", "held-out fraction when no --test is given (default 0.2)"},
    {"learning-rate", "SGD learning rate (default 0.1)"},
    {"epochs", "epoch cap (default 100)"},
    {"patience", "early stopping patience (default 3)"},
    {"validation-fraction", "early stopping hold-out (default 0.2)"},
    {"l2", "L2 penalty (default 1e-4)"},
    {"batch-size", "mini-batch size (default 32)"},
};

// Raw flag values per subcommand, merged into a RunConfig after parsing.
struct Subcommand {
  explicit Subcommand(CLI::App* sub) : app(sub) {}

  CLI::App* app;
  std::map<std::string, std::string> values;

  void add(const std::vector<FlagSpec>& specs) {
    for (const FlagSpec& spec : specs) {
      app->add_option(std::string("--") + spec.name, values[spec.name], spec.help);
    }
  }

  sta::RunConfig resolve() const {
    sta::RunConfig config;
    if (auto* opt = app->get_option_no_throw("--config"); opt && opt->count() > 0) {
      config = sta::load_run_config(values.at("config"), config);
    }
    for (const auto& [name, value] : values) {
      if (name == "config") continue;
      if (app->get_option("--" + name)->count() > 0) config.set(name, value);
    }
    return config;
  }
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw sta::ConfigError(std::string("--") + flag + " is required");
}

// Writes to `path`, or standard output when empty.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sta::LoadError("cannot open output file '" + path + "'");
  fn(out);
  if (!out) throw sta::LoadError("failed writing '" + path + "'");
}

std::map<std::string, std::string> descriptions_for(const sta::RunConfig& config) {
  if (config.label_descriptions.empty()) return {};
  return sta::load_label_descriptions(config.label_descriptions);
}

sta::LabeledCorpus load_logged(const std::string& path,
                               std::map<std::string, std::string> descriptions) {
  auto loaded = sta::load_corpus(path, std::move(descriptions));
  std::cerr << "[sta] " << path << ": " << loaded.corpus.size() << " documents, "
            << loaded.corpus.labels().size() << " labels";
  if (loaded.skipped_empty > 0) {
    std::cerr << ", skipped " << loaded.skipped_empty << " empty document(s)";
  }
  std::cerr << '\n';
  return std::move(loaded.corpus);
}

sta::EmbeddingTable load_embeddings_logged(const std::string& path) {
  auto table = sta::load_embeddings(path);
  std::cerr << "[sta] " << path << ": " << table.size() << " vectors of dimension "
            << table.dimension() << '\n';
  return table;
}

int run_extract(const sta::RunConfig& config) {
  require(config.input, "input");
  require(config.embeddings, "embeddings");
  const auto extraction = config.extraction();
  extraction.validate();
  const auto corpus = load_logged(config.input, descriptions_for(config));
  const auto embeddings = load_embeddings_logged(config.embeddings);
  const auto keywords =
      sta::fit_keywords(corpus, embeddings, extraction, config.epsilon, config.threads);
  with_output(config.output, [&](std::ostream& out) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      sta::write_role_keywords(out, corpus[i], keywords.roles[i]);
    }
  });
  return 0;
}

int run_augment(const sta::RunConfig& config) {
  require(config.input, "input");
  require(config.embeddings, "embeddings");
  const auto augmentation = config.augmentation();
  const auto corpus = load_logged(config.input, descriptions_for(config));
  const auto embeddings = load_embeddings_logged(config.embeddings);
  const auto keywords = sta::fit_keywords(corpus, embeddings, config.extraction(),
                                          config.epsilon, config.threads);
  const sta::SynonymSource synonyms(embeddings, augmentation.synonym_pool_k);
  const auto samples =
      sta::augment_corpus(corpus, keywords, synonyms, augmentation, config.threads);
  std::cerr << "[sta] wrote " << samples.size() << " samples ("
            << samples.size() - corpus.size() << " augmented)\n";
  with_output(config.output,
              [&](std::ostream& out) { sta::write_augmented(out, samples); });
  return 0;
}

int run_eval(const sta::RunConfig& config) {
  require(config.input, "input");
  require(config.embeddings, "embeddings");
  require(config.output, "output");
  const auto experiment = config.experiment();
  const auto descriptions = descriptions_for(config);
  const auto corpus = load_logged(config.input, descriptions);
  const auto embeddings = load_embeddings_logged(config.embeddings);
  sta::ExperimentReport report;
  if (config.test.empty()) {
    report = sta::run_experiment(corpus, embeddings, experiment);
  } else {
    const auto test = load_logged(config.test, descriptions);
    report = sta::run_experiment(corpus, test, embeddings, experiment);
  }
  with_output(config.output,
              [&](std::ostream& out) { out << sta::to_json(report).dump(2) << '\n'; });
  std::cout << sta::render_table(report);
  return 0;
}

int run_report(const sta::RunConfig& config) {
  require(config.input, "input");
  std::ifstream in(config.input);
  if (!in) throw sta::LoadError("cannot open report '" + config.input + "'");
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw sta::LoadError(std::string("malformed report: ") + e.what());
  }
  const auto report = sta::report_from_json(json);
  with_output(config.output, [&](std::ostream& out) { out << sta::render_table(report); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Selective text augmentation: role keyword extraction, augmentation "
               "and evaluation.",
               "sta");
  app.require_subcommand(1);

  Subcommand extract{app.add_subcommand("extract", "extract role keywords to JSONL")};
  extract.add(kShared);
  extract.add(kExtraction);

  Subcommand augment{app.add_subcommand("augment", "write an augmented corpus as JSONL")};
  augment.add(kShared);
  augment.add(kExtraction);
  augment.add(kAugmentation);

  Subcommand eval{app.add_subcommand("eval", "run the augmentation comparison experiment")};
  eval.add(kShared);
  eval.add(kExtraction);
  eval.add(kAugmentation);
  eval.add(kEvaluation);

  Subcommand report{app.add_subcommand("report", "render a report JSON as a table")};
  report.add({{"input", "report JSON"},
              {"config", "flat 'key = value' config file"},
              {"output", "table file (default: standard output)"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*extract.app) return run_extract(extract.resolve());
    if (*augment.app) return run_augment(augment.resolve());
    if (*eval.app) return run_eval(eval.resolve());
    if (*report.app) return run_report(report.resolve());
  } catch (const sta::ConfigError& e) {
    std::cerr << "sta: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "sta: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
