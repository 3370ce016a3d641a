// Copyright 2026 The lexsyn Authors
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

#include "lexsyn/features.h"

#include <cmath>
#include <cstdlib>

#include "lexsyn/csv.h"

namespace lexsyn {

const char* FeatureGroupName(FeatureGroup group) {
  return group == FeatureGroup::kLexical ? "lexical" : "syntactic";
}

FeatureGroup ParseFeatureGroup(std::string_view name) {
  if (name == "lexical") return FeatureGroup::kLexical;
  if (name == "syntactic") return FeatureGroup::kSyntactic;
  throw Error(ErrorKind::kParse, "unknown feature group '" + std::string(name) + "'");
}

void FeatureVector::Add(std::string name, FeatureGroup group, Value value) {
  if (value && !std::isfinite(*value)) value.reset();
  features_.push_back(Feature{std::move(name), group, value});
}

void FeatureVector::Append(const FeatureVector& other) {
  features_.insert(features_.end(), other.features_.begin(),
                   other.features_.end());
}

const Value& FeatureVector::Get(std::string_view name) const {
  for (const auto& f : features_)
    if (f.name == name) return f.value;
  throw Error(ErrorKind::kMismatch, "no feature named '" + std::string(name) + "'");
}

bool FeatureVector::Has(std::string_view name) const {
  for (const auto& f : features_)
    if (f.name == name) return true;
  return false;
}

size_t FeatureTable::FeatureIndex(std::string_view name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw Error(ErrorKind::kMismatch, "no feature column '" + std::string(name) + "'");
}

std::vector<Value> FeatureTable::Column(size_t feature) const {
  std::vector<Value> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(feature));
  return out;
}

void FeatureTable::AddRow(const std::string& doc_id,
                          const std::string& subject_id,
                          const std::string& label,
                          const FeatureVector& vector) {
  if (rows.empty() && names.empty()) {
    for (const auto& f : vector.features()) {
      names.push_back(f.name);
      groups.push_back(f.group);
    }
  }
  if (vector.size() != names.size()) {
    throw Error(ErrorKind::kMismatch,
                "feature vector for '" + doc_id + "' has " +
                    std::to_string(vector.size()) + " features, expected " +
                    std::to_string(names.size()));
  }
  std::vector<Value> row;
  row.reserve(names.size());
  for (size_t i = 0; i < names.size(); ++i) {
    const auto& f = vector.features()[i];
    if (f.name != names[i]) {
      throw Error(ErrorKind::kMismatch, "feature order differs for '" + doc_id +
                                            "' at column " + names[i]);
    }
    row.push_back(f.value);
  }
  doc_ids.push_back(doc_id);
  subject_ids.push_back(subject_id);
  labels.push_back(label);
  rows.push_back(std::move(row));
}

std::string FeatureTable::ToCsv() const {
  CsvWriter w;
  std::vector<std::string> header{"id", "subject_id", "label"};
  header.insert(header.end(), names.begin(), names.end());
  w.Row(header);
  std::vector<std::string> group_row{"#group", "", ""};
  for (auto g : groups) group_row.push_back(FeatureGroupName(g));
  w.Row(group_row);
  for (size_t d = 0; d < rows.size(); ++d) {
    std::vector<std::string> cells{doc_ids[d], subject_ids[d], labels[d]};
    for (const auto& v : rows[d]) cells.push_back(FormatValue(v));
    w.Row(cells);
  }
  return w.str();
}

FeatureTable FeatureTable::FromCsv(std::string_view text, int level) {
  auto records = ParseCsv(text);
  if (records.size() < 2 || records[1].empty() || records[1][0] != "#group") {
    throw Error(ErrorKind::kParse, "feature CSV lacks the two-line header");
  }
  FeatureTable t;
  t.level = level;
  const auto& header = records[0];
  if (header.size() < 3 || header[0] != "id") {
    throw Error(ErrorKind::kParse, "feature CSV header must start with id");
  }
  for (size_t i = 3; i < header.size(); ++i) {
    t.names.push_back(header[i]);
    t.groups.push_back(ParseFeatureGroup(records[1].at(i)));
  }
  for (size_t r = 2; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw Error(ErrorKind::kParse,
                  "feature CSV record " + std::to_string(r + 1) + " has " +
                      std::to_string(rec.size()) + " fields");
    }
    t.doc_ids.push_back(rec[0]);
    t.subject_ids.push_back(rec[1]);
    t.labels.push_back(rec[2]);
    std::vector<Value> row;
    for (size_t i = 3; i < rec.size(); ++i) {
      if (rec[i] == "NA") {
        row.push_back(std::nullopt);
      } else {
        char* end = nullptr;
        double v = std::strtod(rec[i].c_str(), &end);
        if (end == rec[i].c_str() || *end != '\0') {
          throw Error(ErrorKind::kParse, "bad number '" + rec[i] +
                                             "' in feature CSV record " +
                                             std::to_string(r + 1));
        }
        row.push_back(v);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace lexsyn
