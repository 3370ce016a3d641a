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

// Seeded synthetic data: a parsed two-class corpus whose classes differ in
// vocabulary but share one sentence-structure distribution, and Gaussian
// blob feature tables for classifier checks.

#ifndef LEXSYN_SYNTH_H_
#define LEXSYN_SYNTH_H_

#include <string>

#include "lexsyn/corpus.h"
#include "lexsyn/features.h"

namespace lexsyn::synth {

struct CorpusOptions {
  std::string name = "synthetic";
  int documents = 120;
  int max_docs_per_subject = 3;  // subjects hold 1..max documents
  int min_sentences = 6;
  int max_sentences = 14;
  uint64_t seed = 0;
};

// Labels "plain" (small everyday vocabulary) and "varied" (larger, rarer
// vocabulary). Every document carries tagged tokens and one tree per
// sentence.
Corpus MakeTwoStyleCorpus(const CorpusOptions& options);

struct BlobOptions {
  int documents = 400;
  int subjects = 40;
  int features = 10;
  double separation = 2.0;      // distance between class means per feature
  double subject_spread = 0.3;  // sd of a per-subject offset
  bool shuffle_labels = false;  // permute labels across documents
  uint64_t seed = 0;
};

// Half of the columns are tagged lexical, the rest syntactic.
FeatureTable MakeBlobTable(const BlobOptions& options);

}  // namespace lexsyn::synth

#endif  // LEXSYN_SYNTH_H_
