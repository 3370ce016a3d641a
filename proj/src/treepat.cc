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

#include "lexsyn/treepat.h"

#include <cctype>
#include <set>
#include <sstream>

#include "lexsyn/common.h"

namespace lexsyn::treepat {

size_t Tree::LeafCount() const {
  if (IsLeaf()) return 1;
  size_t n = 0;
  for (const auto& c : children) n += c.LeafCount();
  return n;
}

namespace {

void CollectLeaves(const Tree& t, std::vector<std::string>* forms,
                   std::vector<std::string>* tags) {
  if (t.IsLeaf()) {
    if (forms) forms->push_back(t.form);
    if (tags) tags->push_back(t.label);
    return;
  }
  for (const auto& c : t.children) CollectLeaves(c, forms, tags);
}

class PtbReader {
 public:
  explicit PtbReader(std::string_view s) : s_(s) {}

  Tree ReadTop() {
    SkipSpace();
    if (pos_ >= s_.size()) Fail("empty input");
    Tree t = ReadNode();
    SkipSpace();
    if (pos_ != s_.size()) Fail("trailing characters after tree");
    return t;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorKind::kParse,
                "PTB tree at offset " + std::to_string(pos_) + ": " + what);
  }

  void SkipSpace() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  std::string ReadAtom() {
    size_t start = pos_;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')')
        break;
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  Tree ReadNode() {
    if (pos_ >= s_.size() || s_[pos_] != '(') Fail("expected '('");
    ++pos_;
    Tree node;
    SkipSpace();
    if (pos_ >= s_.size()) Fail("unexpected end of input");
    if (s_[pos_] != '(' && s_[pos_] != ')') node.label = ReadAtom();
    SkipSpace();
    if (pos_ >= s_.size()) Fail("unexpected end of input");
    if (s_[pos_] == ')') Fail("empty brackets");
    if (s_[pos_] == '(') {
      while (true) {
        SkipSpace();
        if (pos_ >= s_.size()) Fail("unexpected end of input");
        if (s_[pos_] == ')') break;
        if (s_[pos_] != '(') Fail("bare word among constituent children");
        node.children.push_back(ReadNode());
      }
    } else {
      if (node.label.empty()) Fail("leaf without a tag");
      node.form = ReadAtom();
      SkipSpace();
      if (pos_ >= s_.size()) Fail("unexpected end of input");
      if (s_[pos_] != ')') Fail("expected ')' after leaf form");
    }
    ++pos_;
    return node;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

void RenderInto(const Tree& t, std::string* out) {
  out->push_back('(');
  out->append(t.label);
  if (t.IsLeaf()) {
    out->push_back(' ');
    out->append(t.form);
  } else {
    for (const auto& c : t.children) {
      out->push_back(' ');
      RenderInto(c, out);
    }
  }
  out->push_back(')');
}

}  // namespace

std::vector<std::string> Tree::Leaves() const {
  std::vector<std::string> out;
  CollectLeaves(*this, &out, nullptr);
  return out;
}

std::vector<std::string> Tree::Tags() const {
  std::vector<std::string> out;
  CollectLeaves(*this, nullptr, &out);
  return out;
}

Tree ParsePtb(std::string_view text) { return PtbReader(text).ReadTop(); }

std::string Render(const Tree& tree) {
  std::string out;
  RenderInto(tree, &out);
  return out;
}

// --- labels -----------------------------------------------------------------

LabelMatcher LabelMatcher::Parse(std::string_view spec) {
  LabelMatcher m;
  size_t start = 0;
  while (start <= spec.size()) {
    size_t bar = spec.find('|', start);
    if (bar == std::string_view::npos) bar = spec.size();
    std::string alt(spec.substr(start, bar - start));
    if (alt.empty()) {
      throw Error(ErrorKind::kParse,
                  "empty label alternative in '" + std::string(spec) + "'");
    }
    if (auto slash = alt.find('/'); slash != std::string::npos && slash > 0 &&
                                      slash + 1 < alt.size()) {
      std::string word = alt.substr(slash + 1);
      for (auto& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      m.words_.emplace_back(alt.substr(0, slash), word);
    } else if (alt == "__") {
      m.any_ = true;
    } else if (alt.back() == '*') {
      m.prefixes_.push_back(alt.substr(0, alt.size() - 1));
    } else {
      m.exact_.push_back(alt);
    }
    start = bar + 1;
  }
  return m;
}

bool LabelMatcher::Matches(std::string_view label, std::string_view form) const {
  if (any_) return true;
  for (const auto& [tag, word] : words_) {
    if (label != tag || form.size() != word.size()) continue;
    bool same = true;
    for (size_t i = 0; i < form.size() && same; ++i)
      same = std::tolower(static_cast<unsigned char>(form[i])) == word[i];
    if (same) return true;
  }
  for (const auto& e : exact_)
    if (label == e) return true;
  for (const auto& p : prefixes_)
    if (label.substr(0, p.size()) == p) return true;
  return false;
}

std::string LabelMatcher::ToString() const {
  std::string out;
  auto add = [&](const std::string& s) {
    if (!out.empty()) out.push_back('|');
    out += s;
  };
  for (const auto& e : exact_) add(e);
  for (const auto& p : prefixes_) add(p + "*");
  for (const auto& [tag, word] : words_) add(tag + "/" + word);
  if (any_) add("__");
  return out;
}

// --- pattern parsing ----------------------------------------------------------

namespace {

class PatternReader {
 public:
  explicit PatternReader(std::string_view s) : s_(s) {}

  Pattern ReadTop() {
    Pattern p = ReadNode();
    SkipSpace();
    if (pos_ != s_.size()) Fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorKind::kParse, "pattern '" + std::string(s_) +
                                       "' at offset " + std::to_string(pos_) +
                                       ": " + what);
  }

  void SkipSpace() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  static bool IsLabelChar(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' &&
           c != ')' && c != '<' && c != '!' && c != '=';
  }

  void ReadHead(Pattern* p) {
    p->capture = ReadCapture();
    size_t start = pos_;
    while (pos_ < s_.size() && IsLabelChar(s_[pos_])) ++pos_;
    if (pos_ == start) Fail("label expected");
    p->matcher = LabelMatcher::Parse(s_.substr(start, pos_ - start));
  }

  bool ReadRelation(Relation* rel) {
    SkipSpace();
    auto rest = s_.substr(pos_);
    if (rest.substr(0, 3) == "!<<") {
      *rel = Relation::kLacksDescendant;
      pos_ += 3;
    } else if (rest.substr(0, 2) == "!<") {
      *rel = Relation::kLacksChild;
      pos_ += 2;
    } else if (rest.substr(0, 2) == "<<") {
      *rel = Relation::kDominates;
      pos_ += 2;
    } else if (rest.substr(0, 2) == "<,") {
      *rel = Relation::kHasLeftmostChild;
      pos_ += 2;
    } else if (rest.substr(0, 1) == "<") {
      *rel = Relation::kImmediatelyDominates;
      pos_ += 1;
    } else {
      return false;
    }
    return true;
  }

  std::string ReadCapture() {
    SkipSpace();
    if (pos_ >= s_.size() || s_[pos_] != '=') return {};
    ++pos_;
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) Fail("capture name expected after '='");
    std::string name(s_.substr(start, pos_ - start));
    SkipSpace();
    return name;
  }

  Pattern ReadTarget() {
    SkipSpace();
    size_t mark = pos_;
    std::string capture = ReadCapture();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      Pattern p = ReadNode();
      SkipSpace();
      if (pos_ >= s_.size() || s_[pos_] != ')') Fail("expected ')'");
      ++pos_;
      if (!capture.empty()) {
        if (!p.capture.empty()) Fail("node captured twice");
        p.capture = capture;
      }
      return p;
    }
    pos_ = mark;
    Pattern p;
    ReadHead(&p);
    return p;
  }

  Pattern ReadNode() {
    Pattern p;
    ReadHead(&p);
    Relation rel;
    while (ReadRelation(&rel)) {
      p.constraints.push_back(Constraint{rel, ReadTarget()});
    }
    return p;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

const char* RelationToken(Relation r) {
  switch (r) {
    case Relation::kImmediatelyDominates: return "<";
    case Relation::kDominates: return "<<";
    case Relation::kHasLeftmostChild: return "<,";
    case Relation::kLacksDescendant: return "!<<";
    case Relation::kLacksChild: return "!<";
  }
  return "?";
}

// --- matching -----------------------------------------------------------------

void Descendants(const Tree& t, std::vector<const Tree*>* out) {
  for (const auto& c : t.children) {
    out->push_back(&c);
    Descendants(c, out);
  }
}

bool Satisfies(const Pattern& p, const Tree& node,
               std::vector<const Tree*>* captured) {
  if (!p.matcher.Matches(node.label, node.form)) return false;
  std::vector<const Tree*> local;
  if (!p.capture.empty()) local.push_back(&node);
  for (const auto& c : p.constraints) {
    std::vector<const Tree*> candidates;
    switch (c.relation) {
      case Relation::kImmediatelyDominates:
      case Relation::kLacksChild:
        for (const auto& ch : node.children) candidates.push_back(&ch);
        break;
      case Relation::kDominates:
      case Relation::kLacksDescendant:
        Descendants(node, &candidates);
        break;
      case Relation::kHasLeftmostChild:
        if (!node.children.empty()) candidates.push_back(&node.children.front());
        break;
    }
    const bool negated = c.relation == Relation::kLacksChild ||
                         c.relation == Relation::kLacksDescendant;
    if (negated) {
      for (const Tree* cand : candidates) {
        if (Satisfies(c.target, *cand, nullptr)) return false;
      }
      continue;
    }
    bool found = false;
    for (const Tree* cand : candidates) {
      std::vector<const Tree*> sub;
      if (Satisfies(c.target, *cand, captured ? &sub : nullptr)) {
        found = true;
        local.insert(local.end(), sub.begin(), sub.end());
        if (!captured) break;
      }
    }
    if (!found) return false;
  }
  if (captured) captured->insert(captured->end(), local.begin(), local.end());
  return true;
}

bool HasCapture(const Pattern& p) {
  if (!p.capture.empty()) return true;
  for (const auto& c : p.constraints) {
    const bool negated = c.relation == Relation::kLacksChild ||
                         c.relation == Relation::kLacksDescendant;
    if (!negated && HasCapture(c.target)) return true;
  }
  return false;
}

void PreOrder(const Tree& t, std::vector<const Tree*>* out) {
  out->push_back(&t);
  for (const auto& c : t.children) PreOrder(c, out);
}

std::vector<const Tree*> InPreOrder(const Tree& tree,
                                    const std::set<const Tree*>& nodes) {
  std::vector<const Tree*> all;
  PreOrder(tree, &all);
  std::vector<const Tree*> out;
  for (const Tree* n : all)
    if (nodes.count(n)) out.push_back(n);
  return out;
}

}  // namespace

std::string Pattern::ToString() const {
  std::string out;
  if (!capture.empty()) out += "=" + capture + " ";
  out += matcher.ToString();
  for (const auto& c : constraints) {
    out += " ";
    out += RelationToken(c.relation);
    out += " ";
    if (c.target.constraints.empty()) {
      out += c.target.ToString();
    } else {
      out += "(" + c.target.ToString() + ")";
    }
  }
  return out;
}

Pattern ParsePattern(std::string_view text) {
  return PatternReader(text).ReadTop();
}

std::vector<const Tree*> MatchPattern(const Pattern& pattern,
                                      const Tree& tree) {
  std::vector<const Tree*> nodes;
  PreOrder(tree, &nodes);
  std::vector<const Tree*> out;
  for (const Tree* n : nodes) {
    if (Satisfies(pattern, *n, nullptr)) out.push_back(n);
  }
  return out;
}

std::vector<const Tree*> CapturedNodes(const Pattern& pattern,
                                       const Tree& tree) {
  return CapturedUnion({pattern}, tree);
}

std::vector<const Tree*> CapturedUnion(const std::vector<Pattern>& patterns,
                                       const Tree& tree) {
  std::vector<const Tree*> nodes;
  PreOrder(tree, &nodes);
  std::set<const Tree*> hits;
  for (const auto& pattern : patterns) {
    const bool capturing = HasCapture(pattern);
    for (const Tree* n : nodes) {
      std::vector<const Tree*> captured;
      if (!Satisfies(pattern, *n, &captured)) continue;
      if (capturing) {
        hits.insert(captured.begin(), captured.end());
      } else {
        hits.insert(n);
      }
    }
  }
  return InPreOrder(tree, hits);
}

PatternFile PatternFile::Parse(std::string_view text) {
  PatternFile file;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorKind::kParse,
                  "pattern file line " + std::to_string(lineno) +
                      ": expected 'NAME: PATTERN'");
    }
    std::string name = line.substr(0, colon);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back())))
      name.pop_back();
    std::string body = line.substr(colon + 1);
    if (name == "version") {
      auto b = body.find_first_not_of(' ');
      file.version = b == std::string::npos ? "" : body.substr(b);
      continue;
    }
    if (!file.rules.count(name)) file.order.push_back(name);
    file.rules[name].push_back(ParsePattern(body));
  }
  if (file.version.empty()) {
    throw Error(ErrorKind::kParse, "pattern file has no version line");
  }
  return file;
}

const std::vector<Pattern>& PatternFile::Get(const std::string& name) const {
  auto it = rules.find(name);
  if (it == rules.end()) {
    throw Error(ErrorKind::kConfig, "pattern file lacks rule '" + name + "'");
  }
  return it->second;
}

}  // namespace lexsyn::treepat
