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

#include "phenotyper/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "phenotyper/synthetic.hpp"

namespace phenotyper {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("experiment config field '" + field + "': " + why);
}

template <typename T>
void read_field(const json& j, const char* field, const std::string& where, T& target) {
  if (!j.contains(field)) return;
  try {
    j.at(field).get_to(target);
  } catch (const json::exception&) {
    fail(where + field, "wrong type");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string builtin_spec_json(const std::string& name) {
  if (name == "reference") return dump_synthetic_spec(reference_spec());
  if (name == "reference_compact") return dump_synthetic_spec(reference_compact_spec());
  fail("corpus.builtin", "unknown built-in corpus '" + name + "'");
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig experiment_config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("experiment config: expected a JSON object");
  ExperimentConfig c;

  if (!j.contains("corpus") || !j["corpus"].is_object()) fail("corpus", "missing or not an object");
  const json& corpus = j["corpus"];
  auto resolve = [&base_dir](const std::string& p) {
    const fs::path path(p);
    return fs::weakly_canonical(path.is_absolute() ? path : base_dir / path);
  };
  if (corpus.contains("path")) {
    c.corpus.kind = CorpusSource::Kind::kFile;
    if (!corpus["path"].is_string()) fail("corpus.path", "expected a string");
    c.corpus.path = resolve(corpus["path"].get<std::string>());
    c.corpus.format = format_for_path(c.corpus.path);
    if (corpus.contains("format")) {
      if (!corpus["format"].is_string()) fail("corpus.format", "expected a string");
      c.corpus.format = parse_corpus_format(corpus["format"].get<std::string>());
    }
  } else if (corpus.contains("synthetic_spec")) {
    c.corpus.kind = CorpusSource::Kind::kSyntheticSpec;
    if (!corpus["synthetic_spec"].is_string()) fail("corpus.synthetic_spec", "expected a string");
    c.corpus.path = resolve(corpus["synthetic_spec"].get<std::string>());
  } else if (corpus.contains("builtin")) {
    c.corpus.kind = CorpusSource::Kind::kBuiltin;
    read_field(corpus, "builtin", "corpus.", c.corpus.builtin);
    builtin_spec_json(c.corpus.builtin);
  } else {
    fail("corpus", "expected one of 'path', 'synthetic_spec' or 'builtin'");
  }

  if (j.contains("encoder")) {
    const json& e = j["encoder"];
    if (!e.is_object()) fail("encoder", "expected an object");
    read_field(e, "num_layers", "encoder.", c.encoder.num_layers);
    read_field(e, "hidden", "encoder.", c.encoder.hidden);
    read_field(e, "heads", "encoder.", c.encoder.heads);
    read_field(e, "ffn", "encoder.", c.encoder.ffn);
    read_field(e, "max_positions", "encoder.", c.encoder.max_positions);
  }
  if (j.contains("tokenizer")) {
    const json& t = j["tokenizer"];
    if (!t.is_object()) fail("tokenizer", "expected an object");
    read_field(t, "max_len", "tokenizer.", c.max_len);
    read_field(t, "min_frequency", "tokenizer.", c.min_frequency);
  }

  if (!j.contains("strategies") || !j["strategies"].is_object() || j["strategies"].empty()) {
    fail("strategies", "expected a non-empty object keyed by strategy name");
  }
  for (const auto& [name, value] : j["strategies"].items()) {
    Strategy strategy;
    try {
      strategy = parse_strategy(name);
    } catch (const ConfigError&) {
      fail("strategies." + name, "unknown strategy");
    }
    if (!value.is_object()) fail("strategies." + name, "expected an object");
    json fields = value;
    fields["strategy"] = name;
    try {
      c.strategies.push_back(train_config_from_json(fields, strategy));
    } catch (const ConfigError& e) {
      fail("strategies." + name, e.what());
    }
  }
  // Fixed order regardless of how the file lists them.
  std::stable_sort(c.strategies.begin(), c.strategies.end(),
                   [](const TrainConfig& a, const TrainConfig& b) { return a.strategy < b.strategy; });

  if (j.contains("folds")) {
    const json& f = j["folds"];
    if (!f.is_object()) fail("folds", "expected an object");
    read_field(f, "k", "folds.", c.folds);
    read_field(f, "repeats", "folds.", c.repeats);
  }
  read_field(j, "seed", "", c.seed);
  read_field(j, "threshold", "", c.threshold);
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) fail("threshold", "must lie in [0, 1]");
  if (j.contains("output_dir")) {
    std::string out;
    read_field(j, "output_dir", "", out);
    c.output_dir = resolve(out);
  } else {
    c.output_dir = resolve(c.output_dir.string());
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open experiment config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto j = json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded()) throw ConfigError("experiment config " + path.string() + " is not valid JSON");
  const fs::path base = fs::absolute(path).parent_path();
  if (j.is_object() && j.contains("config") && j.contains("config_hash")) {
    return experiment_config_from_json(j["config"], base);
  }
  return experiment_config_from_json(j, base);
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  switch (c.corpus.kind) {
    case CorpusSource::Kind::kFile:
      j["corpus"] = {{"path", c.corpus.path.string()},
                     {"format", c.corpus.format == CorpusFormat::kCsv ? "csv" : "jsonl"}};
      break;
    case CorpusSource::Kind::kSyntheticSpec:
      j["corpus"] = {{"synthetic_spec", c.corpus.path.string()}};
      break;
    case CorpusSource::Kind::kBuiltin:
      j["corpus"] = {{"builtin", c.corpus.builtin}};
      break;
  }
  j["encoder"] = {{"num_layers", c.encoder.num_layers},
                  {"hidden", c.encoder.hidden},
                  {"heads", c.encoder.heads},
                  {"ffn", c.encoder.ffn},
                  {"max_positions", c.encoder.max_positions}};
  j["tokenizer"] = {{"max_len", c.max_len}, {"min_frequency", c.min_frequency}};
  ordered_json strategies = ordered_json::object();
  for (const auto& t : c.strategies) {
    strategies[std::string(strategy_name(t.strategy))] = {{"learning_rate", t.learning_rate},
                                                          {"batch_size", t.batch_size},
                                                          {"epochs", t.epochs},
                                                          {"weight_decay", t.weight_decay},
                                                          {"shuffle", t.shuffle}};
  }
  j["strategies"] = std::move(strategies);
  j["folds"] = {{"k", c.folds}, {"repeats", c.repeats}};
  j["seed"] = c.seed;
  j["threshold"] = c.threshold;
  j["output_dir"] = c.output_dir.string();
  return j;
}

Corpus load_experiment_corpus(const ExperimentConfig& config) {
  switch (config.corpus.kind) {
    case CorpusSource::Kind::kFile:
      return load_corpus(config.corpus.path, config.corpus.format);
    case CorpusSource::Kind::kSyntheticSpec:
      return generate_synthetic(load_synthetic_spec(config.corpus.path));
    case CorpusSource::Kind::kBuiltin:
      return generate_synthetic(parse_synthetic_spec(builtin_spec_json(config.corpus.builtin)));
  }
  return Corpus();
}

void validate_experiment(const ExperimentConfig& config, const Corpus& corpus) {
  if (config.strategies.empty()) fail("strategies", "no strategy configured");
  if (config.folds < 2) fail("folds.k", "must be at least 2");
  if (config.folds > corpus.size()) {
    fail("folds.k", "K=" + std::to_string(config.folds) + " exceeds corpus size " + std::to_string(corpus.size()));
  }
  if (config.repeats == 0) fail("folds.repeats", "must be at least 1");
  if (config.max_len < 2) fail("tokenizer.max_len", "must be at least 2");
  if (config.min_frequency == 0) fail("tokenizer.min_frequency", "must be at least 1");
  EncoderConfig probe = config.encoder;
  probe.vocab_size = 4;
  probe.validate(config.max_len);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentResult result;
  result.corpus = load_experiment_corpus(config);
  validate_experiment(config, result.corpus);

  std::vector<TrainConfig> strategies;
  for (const auto& t : config.strategies) {
    if (!options.only || *options.only == t.strategy) strategies.push_back(t);
  }
  if (strategies.empty()) {
    fail("strategies", "strategy '" + std::string(strategy_name(*options.only)) + "' is not configured");
  }

  result.plan = stratified_kfold(result.corpus, config.folds, config.repeats, fold_plan_seed(config.seed));

  TransformerSetup setup;
  setup.encoder = config.encoder;
  setup.max_len = config.max_len;
  setup.min_frequency = config.min_frequency;
  setup.threshold = config.threshold;
  setup.seed = config.seed;
  std::vector<NamedModel> models;
  for (const auto& t : strategies) models.push_back({std::string(strategy_name(t.strategy)), transformer_model(setup, t)});

  result.reports = run_cross_validation(result.corpus, result.plan, models, options.jobs, options.on_done);

  const fs::path& out = config.output_dir;
  fs::create_directories(out / "vocab");
  write_text(out / "metrics.json", report_to_json(result.reports, result.plan).dump(2) + "\n");
  write_text(out / "model_level.csv", model_level_csv(result.reports));
  write_text(out / "label_level.csv", label_level_csv(result.reports));
  write_text(out / "loss_log.csv", loss_log_csv(result.reports));

  ordered_json folds = ordered_json::array();
  for (std::size_t r = 0; r < result.plan.repeats; ++r) {
    for (std::size_t f = 0; f < result.plan.folds; ++f) {
      folds.push_back({{"repeat", r}, {"fold", f}, {"test_ids", result.plan.test_ids(r, f)}});
      build_vocab(result.corpus.subset(result.plan.train_positions(r, f)), config.min_frequency)
          .save(out / "vocab" / ("r" + std::to_string(r) + "_f" + std::to_string(f) + ".json"));
    }
  }
  write_text(out / "folds.json", folds.dump(1) + "\n");

  std::ostringstream corpus_bytes;
  write_corpus(corpus_bytes, result.corpus, CorpusFormat::kJsonl);
  const ordered_json normalized = to_json(config);
  ordered_json manifest;
  manifest["format_version"] = 1;
  manifest["config"] = normalized;
  manifest["config_hash"] = hex64(fnv1a64(normalized.dump()));
  manifest["corpus"] = {{"documents", result.corpus.size()}, {"fingerprint", hex64(fnv1a64(corpus_bytes.str()))}};
  ordered_json runs = ordered_json::array();
  for (const auto& report : result.reports) {
    for (const auto& r : report.runs) {
      runs.push_back({{"model", report.name},
                      {"repeat", r.repeat},
                      {"fold", r.fold},
                      {"encoder_seed", r.encoder_seed},
                      {"train_seed", r.train_seed}});
    }
  }
  manifest["seeds"] = {{"master", config.seed}, {"fold_plan", result.plan.seed}, {"runs", std::move(runs)}};
  manifest["artifacts"] = {"metrics.json", "model_level.csv", "label_level.csv", "loss_log.csv", "folds.json", "vocab/"};
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

ordered_json distribution_to_json(const LabelDistribution& d) {
  ordered_json j;
  j["documents"] = d.documents;
  j["total_label_instances"] = d.total_label_instances;
  ordered_json per_label, single;
  for (Label l : kAllLabels) {
    per_label[std::string(label_name(l))] = d.per_label_counts[index_of(l)];
    single[std::string(label_name(l))] = d.single_label_breakdown[index_of(l)];
  }
  j["per_label"] = std::move(per_label);
  j["cardinality"] = d.cardinality_histogram;
  j["single_label"] = std::move(single);
  ordered_json pairs;
  const auto names = label_pairs();
  for (std::size_t k = 0; k < kNumLabelPairs; ++k) {
    pairs[std::string(label_name(names[k].first)) + "+" + std::string(label_name(names[k].second))] =
        d.pair_cooccurrence[k];
  }
  j["pairs"] = std::move(pairs);
  return j;
}

std::string format_distribution(const LabelDistribution& d) {
  std::ostringstream out;
  auto pct = [&d](std::size_t n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f%%", d.documents == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(d.documents));
    return std::string(buf);
  };
  out << "documents              " << d.documents << '\n';
  out << "label instances        " << d.total_label_instances << '\n';
  out << "per label\n";
  for (Label l : kAllLabels) out << "  " << label_name(l) << "\t" << d.per_label_counts[index_of(l)] << '\n';
  out << "labels per document\n";
  for (std::size_t k = 0; k <= kNumLabels; ++k) {
    out << "  " << k << "\t" << d.cardinality_histogram[k] << "\t" << pct(d.cardinality_histogram[k]) << '\n';
  }
  out << "single-label documents\n";
  for (Label l : kAllLabels) out << "  " << label_name(l) << "\t" << d.single_label_breakdown[index_of(l)] << '\n';
  out << "co-occurring pairs\n";
  const auto names = label_pairs();
  for (std::size_t k = 0; k < kNumLabelPairs; ++k) {
    out << "  " << label_name(names[k].first) << "+" << label_name(names[k].second) << "\t"
        << d.pair_cooccurrence[k] << '\n';
  }
  return out.str();
}

}  // namespace phenotyper
