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

#include "phenotyper/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "phenotyper/error.hpp"

namespace phenotyper {
namespace {

using nlohmann::json;

void check_document(const Document& doc, std::unordered_set<std::string>& seen) {
  if (doc.id.empty()) throw Error("document id must be non-empty");
  if (doc.text.empty()) throw Error("document '" + doc.id + "' has empty text");
  if (!seen.insert(doc.id).second) throw Error("duplicate document id '" + doc.id + "'");
}

Document parse_jsonl_record(const std::string& line) {
  const json record = json::parse(line);
  if (!record.is_object()) throw Error("record is not a JSON object");
  for (const char* field : {"id", "text", "labels"}) {
    if (!record.contains(field)) throw Error(std::string("missing field '") + field + "'");
  }
  if (!record["id"].is_string()) throw Error("field 'id' must be a string");
  if (!record["text"].is_string()) throw Error("field 'text' must be a string");
  if (!record["labels"].is_array()) throw Error("field 'labels' must be an array");

  Document doc;
  doc.id = record["id"].get<std::string>();
  doc.text = record["text"].get<std::string>();
  for (const auto& name : record["labels"]) {
    if (!name.is_string()) throw Error("label entries must be strings");
    const auto label = parse_label(name.get<std::string>());
    if (!label) throw Error("unknown label '" + name.get<std::string>() + "'");
    doc.gold.insert(*label);
  }
  return doc;
}

// Splits one RFC 4180 record, which may span several physical lines when a
// quoted field contains a newline. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  for (;;) {
    if (i == line.size()) {
      if (!quoted) break;
      std::string next;
      if (!std::getline(in, next)) throw Error("unterminated quoted field");
      ++line_no;
      if (!next.empty() && next.back() == '\r') next.pop_back();
      field += '\n';
      line = std::move(next);
      i = 0;
      continue;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return true;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Corpus read_jsonl(std::istream& in, const std::string& source) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Document doc = parse_jsonl_record(line);
      check_document(doc, seen);
      docs.push_back(std::move(doc));
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return Corpus(std::move(docs));
}

Corpus read_csv(std::istream& in, const std::string& source) {
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  if (!read_csv_record(in, fields, line_no)) return Corpus();

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < fields.size(); ++i) column[fields[i]] = i;
  std::vector<std::string> required = {"id", "text"};
  for (Label l : kAllLabels) required.emplace_back(label_name(l));
  for (const auto& name : required) {
    if (!column.count(name)) throw ParseError(source, line_no, "missing CSV column '" + name + "'");
  }
  const std::size_t width = fields.size();

  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  for (;;) {
    const std::size_t record_line = line_no + 1;
    try {
      if (!read_csv_record(in, fields, line_no)) break;
      if (fields.size() == 1 && fields[0].empty()) continue;
      if (fields.size() != width) {
        throw Error("expected " + std::to_string(width) + " columns, found " +
                    std::to_string(fields.size()));
      }
      Document doc;
      doc.id = fields[column["id"]];
      doc.text = fields[column["text"]];
      for (Label l : kAllLabels) {
        const std::string& flag = fields[column[std::string(label_name(l))]];
        if (flag == "1") {
          doc.gold.insert(l);
        } else if (flag != "0") {
          throw Error("label column " + std::string(label_name(l)) + " must be 0 or 1, got '" +
                      flag + "'");
        }
      }
      check_document(doc, seen);
      docs.push_back(std::move(doc));
    } catch (const Error& e) {
      throw ParseError(source, record_line, e.what());
    }
  }
  return Corpus(std::move(docs));
}

}  // namespace

CorpusFormat parse_corpus_format(const std::string& name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "csv") return CorpusFormat::kCsv;
  throw ConfigError("unknown corpus format '" + name + "' (expected jsonl or csv)");
}

CorpusFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? CorpusFormat::kCsv : CorpusFormat::kJsonl;
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::unordered_set<std::string> seen;
  for (const auto& doc : documents_) check_document(doc, seen);
}

Corpus Corpus::subset(const std::vector<std::size_t>& positions) const {
  Corpus out;
  out.documents_.reserve(positions.size());
  for (std::size_t p : positions) out.documents_.push_back(documents_.at(p));
  return out;
}

Corpus read_corpus(std::istream& in, CorpusFormat format, const std::string& source_name) {
  return format == CorpusFormat::kJsonl ? read_jsonl(in, source_name) : read_csv(in, source_name);
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  return read_corpus(in, format, path.string());
}

Corpus load_corpus(const std::filesystem::path& path) { return load_corpus(path, format_for_path(path)); }

void write_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format) {
  if (format == CorpusFormat::kJsonl) {
    for (const auto& doc : corpus) {
      json labels = json::array();
      for (Label l : kAllLabels) {
        if (doc.gold.contains(l)) labels.push_back(std::string(label_name(l)));
      }
      json record;
      record["id"] = doc.id;
      record["text"] = doc.text;
      record["labels"] = std::move(labels);
      out << record.dump() << '\n';
    }
    return;
  }
  out << "id,text";
  for (Label l : kAllLabels) out << ',' << label_name(l);
  out << '\n';
  for (const auto& doc : corpus) {
    out << csv_escape(doc.id) << ',' << csv_escape(doc.text);
    for (Label l : kAllLabels) out << ',' << (doc.gold.contains(l) ? '1' : '0');
    out << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file " + path.string());
  write_corpus(out, corpus, format);
}

std::array<std::pair<Label, Label>, kNumLabelPairs> label_pairs() {
  std::array<std::pair<Label, Label>, kNumLabelPairs> pairs;
  std::size_t k = 0;
  for (std::size_t a = 0; a < kNumLabels; ++a) {
    for (std::size_t b = a + 1; b < kNumLabels; ++b) pairs[k++] = {kAllLabels[a], kAllLabels[b]};
  }
  return pairs;
}

std::size_t LabelDistribution::pair_count(Label a, Label b) const {
  const auto pairs = label_pairs();
  for (std::size_t k = 0; k < kNumLabelPairs; ++k) {
    if ((pairs[k].first == a && pairs[k].second == b) || (pairs[k].first == b && pairs[k].second == a)) {
      return pair_cooccurrence[k];
    }
  }
  return 0;
}

LabelDistribution label_distribution(const Corpus& corpus) {
  LabelDistribution dist;
  const auto pairs = label_pairs();
  dist.documents = corpus.size();
  for (const auto& doc : corpus) {
    const std::size_t card = doc.gold.size();
    ++dist.cardinality_histogram[card];
    dist.total_label_instances += card;
    for (Label l : kAllLabels) {
      if (!doc.gold.contains(l)) continue;
      ++dist.per_label_counts[index_of(l)];
      if (card == 1) ++dist.single_label_breakdown[index_of(l)];
    }
    for (std::size_t k = 0; k < kNumLabelPairs; ++k) {
      if (doc.gold.contains(pairs[k].first) && doc.gold.contains(pairs[k].second)) {
        ++dist.pair_cooccurrence[k];
      }
    }
  }
  return dist;
}

}  // namespace phenotyper
