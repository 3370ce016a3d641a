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

// Labeled corpora: loading, validation, serialization and subject-grouped
// cross-validation folds.

#ifndef LEXSYN_CORPUS_H_
#define LEXSYN_CORPUS_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexsyn/common.h"

namespace lexsyn {

struct Token {
  std::string form;
  std::string pos;  // empty when untagged

  bool operator==(const Token&) const = default;
};

// True when the form contains at least one alphanumeric character. Tokens
// made only of punctuation are never deleted and are not counted as words.
bool IsWordForm(std::string_view form);

// Terminal punctuation closes a sentence when no trees are available.
bool IsSentenceTerminal(std::string_view form);

// Lowercases, removes CHAT annotation codes ([...] spans, <> scope marks,
// pause markers, +... terminators, xxx/yyy/www), splits on whitespace and
// detaches leading/trailing punctuation into separate tokens. Filler tokens
// such as "&uh" are kept.
std::vector<std::string> TokenizeText(std::string_view text);

struct Document {
  std::string id;
  std::string subject_id;
  std::string label;
  std::string text;  // raw text as supplied, or the surviving tokens joined
  std::vector<Token> tokens;
  std::vector<std::string> trees;  // one bracketed tree per sentence
  int alteration_level = 0;

  bool operator==(const Document&) const = default;

  bool HasTrees() const { return !trees.empty(); }
  bool IsTagged() const;
  size_t WordCount() const;

  // Token counts per sentence: tree leaf counts when trees are present,
  // otherwise segments closed by terminal punctuation.
  std::vector<size_t> SentenceLengths() const;
  // Lowercased token forms split by sentence.
  std::vector<std::vector<std::string>> SentenceForms() const;
};

struct Corpus {
  std::string name;
  std::vector<Document> documents;

  // The two class labels in sorted order.
  std::vector<std::string> Labels() const;
  // 0/1 index of a label within Labels().
  std::vector<int> LabelIndices() const;
  const Document& Find(std::string_view id) const;
};

enum class CorpusFormat { kJsonl, kCsv };

CorpusFormat ParseCorpusFormat(std::string_view name);

// Parses and validates a corpus. Errors name the offending line:
// kParse for malformed records, kSchema for label/field violations,
// kAlignment when tree leaves and tokens disagree.
Corpus ParseCorpus(std::string_view content, CorpusFormat format,
                   std::string name);
Corpus LoadCorpus(const std::filesystem::path& path, CorpusFormat format);

// Canonical JSONL rendering; ParseCorpus(SerializeCorpus(c)) == c.
std::string SerializeCorpus(const Corpus& corpus);

// Checks document-level invariants and fills derived fields (POS from tree
// preterminals, default subject ids). Used by the loader and by stages that
// construct documents directly.
void ValidateDocument(Document* doc, const std::string& where);
void ValidateCorpus(const Corpus& corpus);

// Document id -> fold index in [0, k).
struct FoldAssignment {
  int k = 0;
  std::map<std::string, int> fold_of;

  int FoldOf(const std::string& doc_id) const;
};

// Greedy subject-grouped assignment: subjects are shuffled under `seed`,
// ordered by size, interleaved by class and each placed in the fold with the
// least total weight. Throws Error(kConfig) when k < 2, when there are fewer
// subjects than folds, or when some training split would miss a class.
FoldAssignment GroupFolds(const Corpus& corpus, int k, uint64_t seed);

}  // namespace lexsyn

#endif  // LEXSYN_CORPUS_H_
