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

#include "phenotyper/cross_validation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace phenotyper {
namespace {

// Production scalar for training; gradient checks run in double.
using TrainScalar = float;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

nlohmann::ordered_json summary_json(const MetricSummary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

nlohmann::ordered_json metrics_json(const BinaryMetrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

std::size_t strategy_stream(Strategy s) { return s == Strategy::kBinaryRelevance ? 0 : 1; }

}  // namespace

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  return s;
}

ModelReport aggregate(std::string name, std::vector<RunRecord> runs) {
  ModelReport report;
  report.name = std::move(name);
  report.runs = std::move(runs);

  auto collect = [&report](auto&& field) {
    std::vector<double> v;
    for (const auto& r : report.runs) v.push_back(field(r));
    return summarize(v);
  };
  report.model_level.overall_accuracy = collect([](const RunRecord& r) { return r.micro.overall_accuracy; });
  report.model_level.precision = collect([](const RunRecord& r) { return r.micro.precision; });
  report.model_level.recall = collect([](const RunRecord& r) { return r.micro.recall; });
  report.model_level.f1 = collect([](const RunRecord& r) { return r.micro.f1; });
  report.model_level.subset_accuracy = collect([](const RunRecord& r) { return r.micro.subset_accuracy; });
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    auto& out = report.label_level[l];
    out.accuracy = collect([l](const RunRecord& r) { return r.per_label[l].accuracy; });
    out.precision = collect([l](const RunRecord& r) { return r.per_label[l].precision; });
    out.recall = collect([l](const RunRecord& r) { return r.per_label[l].recall; });
    out.f1 = collect([l](const RunRecord& r) { return r.per_label[l].f1; });
  }
  return report;
}

std::vector<ModelReport> run_cross_validation(const Corpus& corpus, const FoldPlan& plan,
                                              const std::vector<NamedModel>& models, std::size_t jobs,
                                              const RunCallback& on_done) {
  if (plan.ids.size() != corpus.size()) throw Error("cross-validation: fold plan does not match the corpus");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (plan.ids[i] != corpus[i].id) throw Error("cross-validation: fold plan lists documents in a different order");
  }

  const std::size_t per_model = plan.repeats * plan.folds;
  const std::size_t tasks = per_model * models.size();
  std::vector<RunRecord> records(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::mutex callback_mutex;

  auto run_task = [&](std::size_t t) {
    const std::size_t m = t / per_model;
    const std::size_t repeat = (t % per_model) / plan.folds;
    const std::size_t fold = t % plan.folds;
    RunRecord& record = records[t];
    record.repeat = repeat;
    record.fold = fold;
    try {
      const Corpus train = corpus.subset(plan.train_positions(repeat, fold));
      const Corpus test = corpus.subset(plan.test_positions(repeat, fold));
      record.train_size = train.size();
      record.test_size = test.size();
      const auto predicted = models[m].fit_predict(train, test, record);
      if (predicted.size() != test.size()) throw Error("model returned the wrong number of predictions");

      std::vector<DocumentLabels> pred, gold;
      std::size_t exact = 0;
      for (std::size_t i = 0; i < test.size(); ++i) {
        pred.push_back({test[i].id, predicted[i]});
        gold.push_back({test[i].id, test[i].gold});
        exact += predicted[i] == test[i].gold ? 1 : 0;
      }
      record.confusion = confusion_counts(pred, gold);
      for (std::size_t l = 0; l < kNumLabels; ++l) record.per_label[l] = metrics_from_counts(record.confusion[l]);
      record.micro = micro_from_counts(
          record.confusion, test.empty() ? 0.0 : static_cast<double>(exact) / static_cast<double>(test.size()));
    } catch (const std::exception& e) {
      errors[t] = std::make_exception_ptr(FoldError(repeat, fold, models[m].name, e.what()));
      return;
    }
    if (on_done) {
      std::lock_guard<std::mutex> lock(callback_mutex);
      on_done(models[m].name, record);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, tasks));
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < tasks; t = next++) run_task(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<ModelReport> reports;
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::vector<RunRecord> runs(records.begin() + static_cast<std::ptrdiff_t>(m * per_model),
                                records.begin() + static_cast<std::ptrdiff_t>((m + 1) * per_model));
    reports.push_back(aggregate(models[m].name, std::move(runs)));
  }
  return reports;
}

std::uint64_t run_encoder_seed(std::uint64_t seed, std::size_t repeat, std::size_t fold, Strategy strategy) {
  return derive_seed(derive_seed(derive_seed(seed, repeat), fold), 2 * strategy_stream(strategy));
}

std::uint64_t run_train_seed(std::uint64_t seed, std::size_t repeat, std::size_t fold, Strategy strategy) {
  return derive_seed(derive_seed(derive_seed(seed, repeat), fold), 2 * strategy_stream(strategy) + 1);
}

FitPredict transformer_model(const TransformerSetup& setup, const TrainConfig& train_config) {
  return [setup, train_config](const Corpus& train_split, const Corpus& test, RunRecord& record) {
    const Vocabulary vocab = build_vocab(train_split, setup.min_frequency);
    EncoderConfig encoder = setup.encoder;
    encoder.seed = run_encoder_seed(setup.seed, record.repeat, record.fold, train_config.strategy);
    TrainConfig config = train_config;
    config.seed = run_train_seed(setup.seed, record.repeat, record.fold, train_config.strategy);
    record.encoder_seed = encoder.seed;
    record.train_seed = config.seed;
    record.vocab_size = vocab.size();

    const auto bundle = train<TrainScalar>(train_split, vocab, encoder, config, &record.training, setup.max_len);
    std::vector<LabelSet> predicted;
    predicted.reserve(test.size());
    for (const auto& doc : test) {
      predicted.push_back(threshold(predict(bundle, tokenize(doc.text, vocab, setup.max_len, false)), setup.threshold));
    }
    return predicted;
  };
}

nlohmann::ordered_json report_to_json(const std::vector<ModelReport>& reports, const FoldPlan& plan) {
  nlohmann::ordered_json root;
  root["protocol"] = {{"folds", plan.folds}, {"repeats", plan.repeats}, {"fold_seed", plan.seed}};
  root["models"] = nlohmann::ordered_json::array();
  for (const auto& report : reports) {
    nlohmann::ordered_json m;
    m["name"] = report.name;
    m["model_level"] = {{"overall_accuracy", summary_json(report.model_level.overall_accuracy)},
                        {"precision", summary_json(report.model_level.precision)},
                        {"recall", summary_json(report.model_level.recall)},
                        {"f1", summary_json(report.model_level.f1)},
                        {"subset_accuracy", summary_json(report.model_level.subset_accuracy)}};
    nlohmann::ordered_json labels;
    for (Label l : kAllLabels) {
      const auto& s = report.label_level[index_of(l)];
      labels[std::string(label_name(l))] = {{"accuracy", summary_json(s.accuracy)},
                                            {"precision", summary_json(s.precision)},
                                            {"recall", summary_json(s.recall)},
                                            {"f1", summary_json(s.f1)}};
    }
    m["label_level"] = std::move(labels);
    m["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : report.runs) {
      nlohmann::ordered_json run;
      run["repeat"] = r.repeat;
      run["fold"] = r.fold;
      run["train_size"] = r.train_size;
      run["test_size"] = r.test_size;
      run["encoder_seed"] = r.encoder_seed;
      run["train_seed"] = r.train_seed;
      run["vocab_size"] = r.vocab_size;
      run["encoder_forward_passes"] = r.training.encoder_forward_passes;
      run["encoder_backward_passes"] = r.training.encoder_backward_passes;
      run["optimizer_steps"] = r.training.optimizer_steps;
      run["micro"] = {{"overall_accuracy", r.micro.overall_accuracy},
                      {"precision", r.micro.precision},
                      {"recall", r.micro.recall},
                      {"f1", r.micro.f1},
                      {"subset_accuracy", r.micro.subset_accuracy}};
      nlohmann::ordered_json per_label;
      for (Label l : kAllLabels) {
        const auto& c = r.confusion[index_of(l)];
        auto entry = metrics_json(r.per_label[index_of(l)]);
        entry["tp"] = c.tp;
        entry["fp"] = c.fp;
        entry["fn"] = c.fn;
        entry["tn"] = c.tn;
        per_label[std::string(label_name(l))] = std::move(entry);
      }
      run["labels"] = std::move(per_label);
      m["runs"].push_back(std::move(run));
    }
    root["models"].push_back(std::move(m));
  }
  return root;
}

std::string model_level_csv(const std::vector<ModelReport>& reports) {
  std::ostringstream out;
  out << "model";
  for (const char* metric : {"overall_accuracy", "precision", "recall", "f1", "subset_accuracy"}) {
    out << ',' << metric << "_mean," << metric << "_std";
  }
  out << '\n';
  for (const auto& r : reports) {
    const auto& s = r.model_level;
    out << r.name;
    for (const auto* m : {&s.overall_accuracy, &s.precision, &s.recall, &s.f1, &s.subset_accuracy}) {
      out << ',' << fixed(m->mean) << ',' << fixed(m->std);
    }
    out << '\n';
  }
  return out.str();
}

std::string label_level_csv(const std::vector<ModelReport>& reports) {
  std::ostringstream out;
  out << "model,label";
  for (const char* metric : {"accuracy", "precision", "recall", "f1"}) out << ',' << metric << "_mean," << metric << "_std";
  out << '\n';
  for (const auto& r : reports) {
    for (Label l : kAllLabels) {
      const auto& s = r.label_level[index_of(l)];
      out << r.name << ',' << label_name(l);
      for (const auto* m : {&s.accuracy, &s.precision, &s.recall, &s.f1}) {
        out << ',' << fixed(m->mean) << ',' << fixed(m->std);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string loss_log_csv(const std::vector<ModelReport>& reports) {
  std::ostringstream out;
  out << "repeat,fold,epoch,strategy,label,loss\n";
  for (const auto& r : reports) {
    for (const auto& run : r.runs) {
      for (const auto& e : run.training.epoch_losses) {
        char loss[32];
        std::snprintf(loss, sizeof(loss), "%.9g", e.loss);
        out << run.repeat << ',' << run.fold << ',' << e.epoch << ',' << strategy_name(e.strategy) << ','
            << (e.label ? std::string(label_name(*e.label)) : std::string("ALL")) << ',' << loss << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace phenotyper
