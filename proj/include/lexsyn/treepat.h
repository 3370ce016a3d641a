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

// Penn Treebank bracketed trees and a small relational pattern language.
//
// Pattern syntax (a subset of Tregex):
//
//   pattern    := node
//   node       := ['=' NAME] labels { relation target }
//   target     := '(' node ')' | ['=' NAME] labels
//   labels     := label { '|' label }      e.g.  S|SINV|SQ
//   label      := TAG | PREFIX '*' | '__'   e.g.  NN, VB*, __ (any)
//   relation   := '<'    immediately dominates
//               | '<<'   dominates
//               | '<,'   has leftmost child
//               | '!<<'  lacks descendant
//               | '!<'   lacks child
//
// Relations chained after one node all constrain that node:
// "S < NP < VP" is an S with both an NP child and a VP child. A node
// prefixed with '=' is a capture; CapturedNodes() returns what it bound.

#ifndef LEXSYN_TREEPAT_H_
#define LEXSYN_TREEPAT_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lexsyn::treepat {

// A parse tree node. Preterminals are the leaves: they carry the token
// form and have no children.
struct Tree {
  std::string label;
  std::vector<Tree> children;
  std::string form;

  bool IsLeaf() const { return children.empty(); }
  size_t LeafCount() const;
  // In-order leaf forms.
  std::vector<std::string> Leaves() const;
  // In-order preterminal labels.
  std::vector<std::string> Tags() const;
};

// Parses one bracketed tree. Throws Error(kParse) naming the byte offset.
Tree ParsePtb(std::string_view text);

// Canonical single-space rendering, e.g. "(S (NP (DT the) (NN boy)))".
std::string Render(const Tree& tree);

class LabelMatcher {
 public:
  LabelMatcher() = default;
  // Parses "A|B|VB*|__". An alternative "IN/that" matches a preterminal
  // tagged IN whose word is "that" (case-insensitive).
  static LabelMatcher Parse(std::string_view spec);

  bool Matches(std::string_view label, std::string_view form = {}) const;
  std::string ToString() const;

 private:
  std::vector<std::string> exact_;
  std::vector<std::string> prefixes_;
  std::vector<std::pair<std::string, std::string>> words_;
  bool any_ = false;
};

enum class Relation {
  kImmediatelyDominates,
  kDominates,
  kHasLeftmostChild,
  kLacksDescendant,
  kLacksChild,
};

struct Constraint;

struct Pattern {
  LabelMatcher matcher;
  std::string capture;  // empty when the node is not captured
  std::vector<Constraint> constraints;

  std::string ToString() const;
};

struct Constraint {
  Relation relation;
  Pattern target;
};

// Throws Error(kParse) on malformed pattern text.
Pattern ParsePattern(std::string_view text);

// Every node of `tree` (pre-order) at which `pattern` is satisfied.
std::vector<const Tree*> MatchPattern(const Pattern& pattern, const Tree& tree);

// Nodes bound by captures over all satisfying anchors, de-duplicated and in
// pre-order. When the pattern has no capture, the anchors themselves.
std::vector<const Tree*> CapturedNodes(const Pattern& pattern,
                                       const Tree& tree);

// A versioned set of named patterns. File format, one rule per line:
//
//   # comment
//   version: 1
//   NAME: PATTERN
//
// Repeating NAME adds an alternative; counts take the union of captures.
struct PatternFile {
  std::string version;
  std::map<std::string, std::vector<Pattern>> rules;
  std::vector<std::string> order;  // first-appearance order of names

  static PatternFile Parse(std::string_view text);
  const std::vector<Pattern>& Get(const std::string& name) const;
};

// Union of CapturedNodes over several alternative patterns, in pre-order.
std::vector<const Tree*> CapturedUnion(const std::vector<Pattern>& patterns,
                                       const Tree& tree);

}  // namespace lexsyn::treepat

#endif  // LEXSYN_TREEPAT_H_
