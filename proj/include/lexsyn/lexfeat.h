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

// Lexical richness features: n-gram statistics, entropies and the lexical
// density / sophistication / variation family.
//
// N-gram functions take a list of sentences and never form an n-gram across
// a sentence boundary. A single token sequence is one sentence.

#ifndef LEXSYN_LEXFEAT_H_
#define LEXSYN_LEXFEAT_H_

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexsyn/corpus.h"
#include "lexsyn/features.h"

namespace lexsyn::lexfeat {

using Sentences = std::vector<std::vector<std::string>>;

struct NgramStats {
  int distinct = 0;
  int once = 0;
  Value once_ratio;  // absent when there are no n-grams
};

NgramStats ComputeNgramStats(const Sentences& sentences, int n);

// Shannon entropy (bits) of the n-gram distribution.
Value ShannonEntropy(const Sentences& sentences, int n);

// Entropy of the last token of each n-gram given the preceding n-1 tokens.
Value ConditionalEntropy(const Sentences& sentences, int n);

// Ranked common-word list; rank 1 is the most frequent word.
class Wordlist {
 public:
  Wordlist() = default;
  static Wordlist Load(const std::filesystem::path& path);
  static Wordlist FromWords(const std::vector<std::string>& ranked);

  // 0 when the word is not listed.
  int Rank(const std::string& word) const;
  size_t size() const { return rank_.size(); }

 private:
  std::unordered_map<std::string, int> rank_;
};

struct LexicalConfig {
  int sophistication_cutoff = 2000;
  std::vector<std::string> lexical_tagset{"NN", "VB", "JJ", "RB"};
  std::vector<std::string> verb_tagset{"VB"};
  // Forms never counted as lexical verbs.
  std::vector<std::string> auxiliaries{
      "be",   "am",   "is",  "are",  "was", "were", "been", "being",
      "'s",   "'re",  "'m",  "have", "has", "had",  "having", "'ve",
      "'d",   "do",   "does", "did", "done", "doing"};
  int segment_size = 50;
  int random_samples = 10;
  uint64_t seed = 0;

  void Validate() const;
};

// The 24 density/sophistication/variation features, in their fixed order.
// Throws Error(kTaggingRequired) if any word token lacks a POS tag.
FeatureVector LcaFeatures(const std::vector<Token>& tokens,
                          const LexicalConfig& config,
                          const Wordlist& wordlist);

// All 37 lexical features for a document.
FeatureVector ExtractLexical(const Document& doc, const LexicalConfig& config,
                             const Wordlist& wordlist);

// Names of the 37 lexical features in emission order.
const std::vector<std::string>& LexicalFeatureNames();

// Mean character length of word tokens; absent when there are none.
Value MeanWordLength(const Document& doc);

}  // namespace lexsyn::lexfeat

#endif  // LEXSYN_LEXFEAT_H_
