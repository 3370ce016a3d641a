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

// Corpus-level summary: the mean of each overview row across documents.

#ifndef LEXSYN_PROFILE_H_
#define LEXSYN_PROFILE_H_

#include <string>
#include <vector>

#include "lexsyn/corpus.h"
#include "lexsyn/synfeat.h"

namespace lexsyn {

struct ProfileRow {
  std::string key;      // feature name, e.g. "entropy_1gram" or "C/S"
  std::string section;  // row subgroup, e.g. "lexical richness"
  Value value;          // absent when no document defines the row
  int documents = 0;    // documents contributing to the mean
};

struct DatasetProfile {
  std::string corpus;
  std::vector<ProfileRow> rows;

  Value Get(std::string_view key) const;
};

// Row keys in presentation order.
const std::vector<std::string>& ProfileRowKeys();

// Each row is the mean over documents where it is defined; sums run over
// sorted values so the result does not depend on document order. Syntactic
// rows are absent when no document has trees.
DatasetProfile ProfileCorpus(const Corpus& corpus,
                             const synfeat::SyntaxResources& res = synfeat::SyntaxResources::Default(),
                             int jobs = 1);

}  // namespace lexsyn

#endif  // LEXSYN_PROFILE_H_
