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

#include "lexsyn/profile.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "lexsyn/lexfeat.h"

namespace lexsyn {

namespace {

struct RowDef {
  const char* key;
  const char* section;
};

const std::vector<RowDef>& RowDefs() {
  static const std::vector<RowDef> kRows{
      {"distinct_tokens_ratio", "lexical richness"},
      {"distinct_bigrams_ratio", "lexical richness"},
      {"distinct_trigrams_ratio", "lexical richness"},
      {"entropy_1gram", "lexical complexity"},
      {"entropy_2gram", "lexical complexity"},
      {"entropy_3gram", "lexical complexity"},
      {"cond_entropy_2gram", "lexical complexity"},
      {"cond_entropy_3gram", "lexical complexity"},
      {"lexicon_complexity", "lexical complexity"},
      {"MLC", "length of production unit"},
      {"MLS", "length of production unit"},
      {"MLT", "length of production unit"},
      {"C/S", "sentence complexity"},
      {"dlevel_0", "sentence complexity"},
      {"dlevel_1_4", "sentence complexity"},
      {"dlevel_5_7", "sentence complexity"},
      {"C/T", "amount of subordination"},
      {"CT/T", "amount of subordination"},
      {"DC/T", "amount of subordination"},
      {"DC/C", "amount of subordination"},
      {"CP/C", "amount of coordination"},
      {"CP/T", "amount of coordination"},
      {"T/S", "amount of coordination"},
      {"CN/C", "particular structures"},
      {"CN/T", "particular structures"},
      {"VP/T", "particular structures"},
  };
  return kRows;
}

}  // namespace

const std::vector<std::string>& ProfileRowKeys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> k;
    for (const auto& r : RowDefs()) k.push_back(r.key);
    return k;
  }();
  return kKeys;
}

Value DatasetProfile::Get(std::string_view key) const {
  for (const auto& r : rows) {
    if (r.key == key) return r.value;
  }
  throw Error(ErrorKind::kMismatch, "profile has no row '" + std::string(key) + "'");
}

DatasetProfile ProfileCorpus(const Corpus& corpus, const synfeat::SyntaxResources& res,
                             int jobs) {
  const size_t n = corpus.documents.size();
  std::vector<std::map<std::string, Value>> per_doc(n);
  ParallelFor(n, jobs, [&](size_t i) {
    const Document& doc = corpus.documents[i];
    auto& out = per_doc[i];
    const auto sentences = doc.SentenceForms();
    out["distinct_tokens_ratio"] = lexfeat::ComputeNgramStats(sentences, 1).once_ratio;
    out["distinct_bigrams_ratio"] = lexfeat::ComputeNgramStats(sentences, 2).once_ratio;
    out["distinct_trigrams_ratio"] = lexfeat::ComputeNgramStats(sentences, 3).once_ratio;
    out["entropy_1gram"] = lexfeat::ShannonEntropy(sentences, 1);
    out["entropy_2gram"] = lexfeat::ShannonEntropy(sentences, 2);
    out["entropy_3gram"] = lexfeat::ShannonEntropy(sentences, 3);
    out["cond_entropy_2gram"] = lexfeat::ConditionalEntropy(sentences, 2);
    out["cond_entropy_3gram"] = lexfeat::ConditionalEntropy(sentences, 3);
    out["lexicon_complexity"] = lexfeat::MeanWordLength(doc);
    if (doc.HasTrees()) {
      const FeatureVector syntactic = synfeat::ExtractSyntactic(doc, res);
      for (const auto& f : syntactic.features()) {
        out[f.name] = f.value;
      }
    }
  });
  DatasetProfile profile;
  profile.corpus = corpus.name;
  for (const auto& def : RowDefs()) {
    std::vector<double> vals;
    for (const auto& m : per_doc) {
      auto it = m.find(def.key);
      if (it != m.end() && it->second) vals.push_back(*it->second);
    }
    ProfileRow row;
    row.key = def.key;
    row.section = def.section;
    row.documents = static_cast<int>(vals.size());
    if (!vals.empty()) {
      std::sort(vals.begin(), vals.end());
      row.value = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    }
    profile.rows.push_back(std::move(row));
  }
  return profile;
}

}  // namespace lexsyn
