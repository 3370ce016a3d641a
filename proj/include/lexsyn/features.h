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

#ifndef LEXSYN_FEATURES_H_
#define LEXSYN_FEATURES_H_

#include <string>
#include <string_view>
#include <vector>

#include "lexsyn/common.h"

namespace lexsyn {

enum class FeatureGroup { kLexical, kSyntactic };

const char* FeatureGroupName(FeatureGroup group);
FeatureGroup ParseFeatureGroup(std::string_view name);

struct Feature {
  std::string name;
  FeatureGroup group;
  Value value;
};

// Named features in a fixed order. Undefined values are std::nullopt, never
// NaN.
class FeatureVector {
 public:
  void Add(std::string name, FeatureGroup group, Value value);
  void Append(const FeatureVector& other);

  const std::vector<Feature>& features() const { return features_; }
  size_t size() const { return features_.size(); }

  // Throws Error(kMismatch) when the feature is unknown.
  const Value& Get(std::string_view name) const;
  bool Has(std::string_view name) const;

 private:
  std::vector<Feature> features_;
};

// Per-document feature rows for one corpus at one alteration level.
struct FeatureTable {
  int level = 0;
  std::vector<std::string> names;
  std::vector<FeatureGroup> groups;
  std::vector<std::string> doc_ids;
  std::vector<std::string> subject_ids;
  std::vector<std::string> labels;
  std::vector<std::vector<Value>> rows;  // rows[doc][feature]

  size_t FeatureIndex(std::string_view name) const;
  std::vector<Value> Column(size_t feature) const;

  // Appends a document; the first vector fixes the column layout and later
  // vectors must match it.
  void AddRow(const std::string& doc_id, const std::string& subject_id,
              const std::string& label, const FeatureVector& vector);

  // CSV with a two-line header: feature names, then feature groups.
  std::string ToCsv() const;
  static FeatureTable FromCsv(std::string_view text, int level);
};

}  // namespace lexsyn

#endif  // LEXSYN_FEATURES_H_
