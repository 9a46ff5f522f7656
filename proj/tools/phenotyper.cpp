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

// Command-line entry point: gen, stats, run, gradcheck.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "phenotyper/corpus.hpp"
#include "phenotyper/error.hpp"
#include "phenotyper/experiment.hpp"
#include "phenotyper/gradcheck.hpp"
#include "phenotyper/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using namespace phenotyper;

constexpr double kGradTolerance = 1e-4;
constexpr double kHeadGradTolerance = 1e-6;  // layers = 0

// Errors leave as one JSON object on one stderr line.
int report_error(const std::string& kind, const std::string& message,
                 const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  std::cerr << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  return 1;
}

SyntheticSpec resolve_spec(const std::string& spec) {
  if (spec == "reference") return reference_spec();
  if (spec == "reference_compact") return reference_compact_spec();
  return load_synthetic_spec(spec);
}

int cmd_gen(const std::string& spec_arg, const std::string& out, std::optional<std::uint64_t> seed) {
  SyntheticSpec spec = resolve_spec(spec_arg);
  if (seed) spec.seed = *seed;
  const Corpus corpus = generate_synthetic(spec);
  if (out.empty() || out == "-") {
    write_corpus(std::cout, corpus, CorpusFormat::kJsonl);
  } else {
    write_corpus(fs::path(out), corpus, CorpusFormat::kJsonl);
    std::cerr << "wrote " << corpus.size() << " documents to " << out << '\n';
  }
  return 0;
}

int cmd_stats(const std::string& path, const std::string& format, bool json_only, const std::string& out) {
  const Corpus corpus = format.empty() ? load_corpus(path) : load_corpus(path, parse_corpus_format(format));
  const auto dist = label_distribution(corpus);
  const auto j = distribution_to_json(dist);
  if (json_only) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << format_distribution(dist);
  }
  if (!out.empty()) {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw Error("cannot write " + out);
    file << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out,
            std::size_t jobs, const std::string& strategy) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (seed) config.seed = *seed;
  if (!out.empty()) config.output_dir = fs::absolute(out);
  RunOptions options;
  options.jobs = jobs;
  if (strategy != "both") options.only = parse_strategy(strategy);
  options.on_done = [](const std::string& model, const RunRecord& r) {
    std::fprintf(stderr, "done %s repeat %zu fold %zu micro_f1 %.4f\n", model.c_str(), r.repeat, r.fold,
                 r.micro.f1);
  };
  const auto result = run_experiment(config, options);
  for (const auto& report : result.reports) {
    const auto& m = report.model_level;
    std::printf("%-17s accuracy %.4f±%.4f  precision %.4f±%.4f  recall %.4f±%.4f  f1 %.4f±%.4f\n",
                report.name.c_str(), m.overall_accuracy.mean, m.overall_accuracy.std, m.precision.mean,
                m.precision.std, m.recall.mean, m.recall.std, m.f1.mean, m.f1.std);
  }
  std::printf("artifacts in %s\n", config.output_dir.string().c_str());
  return 0;
}

int cmd_gradcheck(bool corrupt) {
  const ProbeBatch probe = probe_batch();
  GradCheckOptions options;
  options.corrupt_analytic = corrupt;
  bool pass = true;
  // Full probe encoder, then the head on its own (no encoder layers).
  for (std::size_t layers : {1, 0}) {
    EncoderConfig config = probe_config(probe.vocab.size());
    config.num_layers = layers;
    const double tolerance = layers == 0 ? kHeadGradTolerance : kGradTolerance;
    for (Strategy s : {Strategy::kMultiLabel, Strategy::kBinaryRelevance}) {
      const auto report = grad_check(s, config, probe.sequences, probe.golds, options);
      const bool ok = report.max_relative_error < tolerance;
      pass = pass && ok;
      std::printf("%-17s layers %zu  max_relative_error %.6e  tolerance %.0e  coordinates %zu  %s\n",
                  std::string(strategy_name(s)).c_str(), layers, report.max_relative_error, tolerance,
                  report.coordinates, ok ? "PASS" : "FAIL");
    }
  }
  std::printf("gradcheck %s\n", pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Suicidal-event phenotyping of clinical notes: corpus tools and transformer experiments"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a labeled synthetic corpus as JSONL");
  std::string gen_spec = "reference";
  std::string gen_out;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--spec", gen_spec, "Spec file, or a built-in name (reference, reference_compact)")
      ->capture_default_str();
  gen->add_option("-o,--out", gen_out, "Output path (stdout when omitted)");
  gen->add_option("--seed", gen_seed, "Override the generator seed");

  auto* stats = app.add_subcommand("stats", "Report the label distribution of a corpus");
  std::string stats_path, stats_format, stats_out;
  bool stats_json = false;
  stats->add_option("corpus", stats_path, "Corpus file (.jsonl or .csv)")->required();
  stats->add_option("--format", stats_format, "jsonl or csv (default: from the extension)");
  stats->add_flag("--json", stats_json, "Print the JSON report instead of text");
  stats->add_option("-o,--out", stats_out, "Also write the JSON report to this file");

  auto* run = app.add_subcommand("run", "Run repeated stratified cross-validation from a config or manifest");
  std::string run_config, run_out, run_strategy = "both";
  std::optional<std::uint64_t> run_seed;
  std::size_t run_jobs = 1;
  run->add_option("config", run_config, "Experiment config or manifest.json")->required();
  run->add_option("--seed", run_seed, "Override the master seed");
  run->add_option("-o,--out", run_out, "Override the output directory");
  run->add_option("-j,--jobs", run_jobs, "Worker threads for independent folds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--strategy", run_strategy, "Strategy to run")
      ->check(CLI::IsMember({"binary_relevance", "multi_label", "both"}))
      ->capture_default_str();

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the backward pass");
  bool corrupt = false;
  gradcheck->add_flag("--corrupt-analytic", corrupt, "Perturb one analytic gradient entry (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    if (*gen) return cmd_gen(gen_spec, gen_out, gen_seed);
    if (*stats) return cmd_stats(stats_path, stats_format, stats_json, stats_out);
    if (*run) return cmd_run(run_config, run_seed, run_out, run_jobs, run_strategy);
    if (*gradcheck) return cmd_gradcheck(corrupt);
  } catch (const FoldError& e) {
    return report_error("fold", e.what(), {{"repeat", e.repeat()}, {"fold", e.fold()}});
  } catch (const ParseError& e) {
    return report_error("parse", e.what());
  } catch (const ConfigError& e) {
    return report_error("config", e.what());
  } catch (const NumericalError& e) {
    return report_error("numerical", e.what());
  } catch (const std::exception& e) {
    return report_error("error", e.what());
  }
  return 0;
}
