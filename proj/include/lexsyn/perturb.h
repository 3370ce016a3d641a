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

// Seeded random word deletion and the matching update of parse trees.

#ifndef LEXSYN_PERTURB_H_
#define LEXSYN_PERTURB_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lexsyn/corpus.h"
#include "lexsyn/treepat.h"

namespace lexsyn::perturb {

enum class TreeStrategy { kProject, kReparse };

TreeStrategy ParseTreeStrategy(std::string_view name);
const char* TreeStrategyName(TreeStrategy strategy);

struct PerturbationPlan {
  std::vector<int> levels{20, 40, 60, 80};
  uint64_t seed = 0;
  TreeStrategy tree_strategy = TreeStrategy::kProject;
  std::string parser_command;  // used by kReparse

  // Levels must lie in [0, 100] and be strictly increasing.
  void Validate() const;
};

// Number of words removed from a document with n words at `percent`:
// round-half-up of percent*n/100, capped at n-1.
int DeletionCount(int n, int percent);

// Deletes DeletionCount(n, level) word tokens chosen uniformly without
// replacement under a generator seeded from (seed, doc.id, level).
// Punctuation tokens are not candidates; a sentence left without words is
// dropped along with its punctuation and tree. Trees are projected onto the
// survivors by leaf pruning.
Document DeleteWords(const Document& doc, int level, uint64_t seed);

// Token positions DeleteWords would remove as words (before dropping
// emptied sentences), in increasing order.
std::vector<size_t> DeletedWordPositions(const Document& doc, int level,
                                         uint64_t seed);

// Removes the listed leaves, prunes internal nodes left without leaves and
// keeps unary chains. Returns nullopt when every leaf is deleted. Throws
// Error(kRange) for an index outside [0, leaf count).
std::optional<treepat::Tree> ProjectTreeDeletion(
    const treepat::Tree& tree, const std::set<size_t>& deleted_leaves);

// Runs `command` through the shell with one space-joined sentence per line
// on stdin and reads one bracketed tree per line from stdout. Throws
// Error(kExternalTool) on nonzero exit or unparseable output (the message
// carries the tool's stderr) and Error(kAlignment) when the trees' leaves
// differ from the given sentences.
std::vector<treepat::Tree> ReparseExternal(
    const std::vector<std::vector<std::string>>& sentences,
    const std::string& command);

// One altered corpus per plan level, documents in input order.
std::map<int, Corpus> PerturbCorpus(const Corpus& corpus,
                                    const PerturbationPlan& plan, int jobs = 1);

}  // namespace lexsyn::perturb

#endif  // LEXSYN_PERTURB_H_
