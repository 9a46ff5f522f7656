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

#include "phenotyper/synthetic.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "phenotyper/error.hpp"
#include "phenotyper/rng.hpp"

namespace phenotyper {
namespace {

using nlohmann::json;

constexpr const char* kJoiner = " and ";

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ConfigError("synthetic spec field '" + field + "': " + why);
}

const json& member(const json& j, const char* field) {
  if (!j.contains(field)) throw ConfigError(std::string("synthetic spec field '") + field + "': missing");
  return j.at(field);
}

template <typename T>
T get_field(const json& j, const char* field) {
  try {
    return member(j, field).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("synthetic spec field '") + field + "': wrong type");
  }
}

std::vector<std::string> string_list(const json& j, const std::string& field) {
  require(j.is_array(), field, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : j) {
    require(s.is_string(), field, "expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  require(!spec.composition.empty(), "composition", "must not be empty");
  std::set<std::uint8_t> seen;
  std::size_t total = 0;
  for (const auto& entry : spec.composition) {
    require(seen.insert(entry.labels.mask()).second, "composition",
            "label set " + entry.labels.to_string() + " listed more than once");
    total += entry.count;
  }
  require(total == spec.corpus_size, "composition",
          "counts sum to " + std::to_string(total) + " but corpus_size is " +
              std::to_string(spec.corpus_size));
  require(spec.min_sentences >= 1, "sentences.min", "must be at least 1");
  require(spec.max_sentences >= spec.min_sentences, "sentences.max", "must be >= sentences.min");
  require(spec.trigger_window >= 1, "trigger_window", "must be at least 1");
  require(spec.extra_phrase_probability >= 0.0 && spec.extra_phrase_probability <= 1.0,
          "extra_phrase_probability", "must lie in [0, 1]");
  require(!spec.phrases.lead_ins.empty(), "phrases.lead_ins", "must not be empty");
  require(!spec.phrases.distractors.empty(), "phrases.distractors", "must not be empty");

  // Every other string a phrase could accidentally be found in.
  std::vector<std::pair<std::size_t, const std::string*>> bank;
  for (Label l : kAllLabels) {
    const std::string field = "phrases.triggers." + std::string(label_name(l));
    require(!spec.phrases.triggers[index_of(l)].empty(), field, "must not be empty");
    for (const auto& p : spec.phrases.triggers[index_of(l)]) {
      require(!p.empty(), field, "empty phrase");
      require(p.find('.') == std::string::npos, field, "phrase '" + p + "' contains '.'");
      require(p.find(kJoiner) == std::string::npos, field, "phrase '" + p + "' contains ' and '");
      bank.emplace_back(index_of(l), &p);
    }
  }
  for (const auto& s : spec.phrases.lead_ins) bank.emplace_back(kNumLabels, &s);
  for (const auto& s : spec.phrases.distractors) bank.emplace_back(kNumLabels, &s);
  for (const auto& [owner, phrase] : bank) {
    if (owner == kNumLabels) continue;
    for (const auto& [other_owner, other] : bank) {
      if (other_owner == owner) continue;
      require(other->find(*phrase) == std::string::npos,
              "phrases.triggers." + std::string(label_name(kAllLabels[owner])),
              "phrase '" + *phrase + "' occurs inside '" + *other + "'");
    }
  }
}

SyntheticSpec parse_synthetic_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synthetic spec is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "<root>", "expected a JSON object");

  SyntheticSpec spec;
  spec.seed = get_field<std::uint64_t>(j, "seed");
  spec.corpus_size = get_field<std::size_t>(j, "corpus_size");
  if (j.contains("id_prefix")) spec.id_prefix = get_field<std::string>(j, "id_prefix");
  const json& sentences = member(j, "sentences");
  spec.min_sentences = get_field<std::size_t>(sentences, "min");
  spec.max_sentences = get_field<std::size_t>(sentences, "max");
  spec.trigger_window = get_field<std::size_t>(j, "trigger_window");
  spec.extra_phrase_probability = get_field<double>(j, "extra_phrase_probability");

  const json& composition = member(j, "composition");
  require(composition.is_array(), "composition", "expected an array");
  for (std::size_t i = 0; i < composition.size(); ++i) {
    const json& e = composition[i];
    const std::string where = "composition[" + std::to_string(i) + "]";
    require(e.is_object() && e.contains("labels") && e.contains("count"), where,
            "expected {\"labels\": [...], \"count\": n}");
    CompositionEntry entry;
    for (const auto& name : string_list(e["labels"], where + ".labels")) {
      const auto label = parse_label(name);
      require(label.has_value(), where + ".labels", "unknown label '" + name + "'");
      entry.labels.insert(*label);
    }
    require(e["count"].is_number_unsigned(), where + ".count", "expected a non-negative integer");
    entry.count = e["count"].get<std::size_t>();
    spec.composition.push_back(entry);
  }

  const json& phrases = member(j, "phrases");
  const json& triggers = member(phrases, "triggers");
  for (Label l : kAllLabels) {
    const std::string name(label_name(l));
    require(triggers.contains(name), "phrases.triggers." + name, "missing");
    spec.phrases.triggers[index_of(l)] = string_list(triggers[name], "phrases.triggers." + name);
  }
  spec.phrases.lead_ins = string_list(member(phrases, "lead_ins"), "phrases.lead_ins");
  spec.phrases.distractors = string_list(member(phrases, "distractors"), "phrases.distractors");

  validate(spec);
  return spec;
}

std::string dump_synthetic_spec(const SyntheticSpec& spec) {
  json j;
  j["seed"] = spec.seed;
  j["corpus_size"] = spec.corpus_size;
  j["id_prefix"] = spec.id_prefix;
  j["sentences"] = {{"min", spec.min_sentences}, {"max", spec.max_sentences}};
  j["trigger_window"] = spec.trigger_window;
  j["extra_phrase_probability"] = spec.extra_phrase_probability;
  json composition = json::array();
  for (const auto& entry : spec.composition) {
    json labels = json::array();
    for (Label l : kAllLabels) {
      if (entry.labels.contains(l)) labels.push_back(std::string(label_name(l)));
    }
    composition.push_back({{"labels", labels}, {"count", entry.count}});
  }
  j["composition"] = composition;
  json triggers = json::object();
  for (Label l : kAllLabels) triggers[std::string(label_name(l))] = spec.phrases.triggers[index_of(l)];
  j["phrases"] = {{"triggers", triggers},
                  {"lead_ins", spec.phrases.lead_ins},
                  {"distractors", spec.phrases.distractors}};
  return j.dump(2) + "\n";
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open synthetic spec " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_synthetic_spec(buffer.str());
}

Corpus generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  std::vector<LabelSet> plan;
  plan.reserve(spec.corpus_size);
  for (const auto& entry : spec.composition) plan.insert(plan.end(), entry.count, entry.labels);
  rng.shuffle(std::span<LabelSet>(plan));

  const int width = static_cast<int>(std::to_string(plan.size()).size());
  std::vector<Document> docs;
  docs.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const LabelSet gold = plan[i];
    const auto sentences =
        static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.min_sentences),
                                             static_cast<std::int64_t>(spec.max_sentences)));
    const std::size_t window = std::min(sentences, spec.trigger_window);

    std::vector<std::vector<const std::string*>> slots(sentences);
    for (Label l : kAllLabels) {
      if (!gold.contains(l)) continue;
      const auto& bank = spec.phrases.triggers[index_of(l)];
      const std::size_t first = rng.below(bank.size());
      slots[rng.below(window)].push_back(&bank[first]);
      if (bank.size() > 1 && rng.uniform() < spec.extra_phrase_probability) {
        const std::size_t second = (first + 1 + rng.below(bank.size() - 1)) % bank.size();
        slots[rng.below(window)].push_back(&bank[second]);
      }
    }

    std::string text;
    for (const auto& slot : slots) {
      if (!text.empty()) text += ' ';
      if (slot.empty()) {
        text += spec.phrases.distractors[rng.below(spec.phrases.distractors.size())];
        continue;
      }
      text += spec.phrases.lead_ins[rng.below(spec.phrases.lead_ins.size())];
      for (std::size_t k = 0; k < slot.size(); ++k) {
        text += k == 0 ? " " : kJoiner;
        text += *slot[k];
      }
      text += '.';
    }

    char id[64];
    std::snprintf(id, sizeof(id), "%s-%0*zu", spec.id_prefix.c_str(), width, i + 1);
    docs.push_back(Document{id, std::move(text), gold});
  }
  return Corpus(std::move(docs));
}

}  // namespace phenotyper
