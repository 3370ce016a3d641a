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

#include "lexsyn/perturb.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lexsyn::perturb {

using treepat::Tree;

TreeStrategy ParseTreeStrategy(std::string_view name) {
  if (name == "project") return TreeStrategy::kProject;
  if (name == "reparse") return TreeStrategy::kReparse;
  throw Error(ErrorKind::kConfig, "unknown tree strategy '" + std::string(name) +
                                      "' (expected project or reparse)");
}

const char* TreeStrategyName(TreeStrategy strategy) {
  return strategy == TreeStrategy::kProject ? "project" : "reparse";
}

void PerturbationPlan::Validate() const {
  for (size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0 || levels[i] > 100) {
      throw Error(ErrorKind::kRange,
                  "alteration level " + std::to_string(levels[i]) + " outside [0, 100]");
    }
    if (i > 0 && levels[i] <= levels[i - 1]) {
      throw Error(ErrorKind::kConfig, "alteration levels must be strictly increasing");
    }
  }
  if (tree_strategy == TreeStrategy::kReparse && parser_command.empty()) {
    throw Error(ErrorKind::kConfig, "tree strategy reparse needs a parser command");
  }
}

int DeletionCount(int n, int percent) {
  if (percent < 0 || percent > 100) {
    throw Error(ErrorKind::kRange,
                "alteration level " + std::to_string(percent) + " outside [0, 100]");
  }
  if (n <= 0) return 0;
  const long long d = (static_cast<long long>(percent) * n + 50) / 100;
  return static_cast<int>(std::min<long long>(d, n - 1));
}

std::vector<size_t> DeletedWordPositions(const Document& doc, int level,
                                         uint64_t seed) {
  std::vector<size_t> words;
  for (size_t i = 0; i < doc.tokens.size(); ++i) {
    if (IsWordForm(doc.tokens[i].form)) words.push_back(i);
  }
  const int d = DeletionCount(static_cast<int>(words.size()), level);
  Rng rng(DeriveSeed(seed, doc.id, level));
  // Partial Fisher-Yates: the first d slots become a uniform sample.
  for (int i = 0; i < d; ++i) {
    const size_t j = i + static_cast<size_t>(rng.UniformIndex(words.size() - i));
    std::swap(words[i], words[j]);
  }
  words.resize(d);
  std::sort(words.begin(), words.end());
  return words;
}

namespace {

// Returns false when the subtree lost every leaf.
bool Prune(const Tree& in, const std::set<size_t>& deleted, size_t* next, Tree* out) {
  if (in.IsLeaf()) {
    const bool keep = !deleted.count(*next);
    ++*next;
    if (keep) *out = in;
    return keep;
  }
  out->label = in.label;
  out->form.clear();
  out->children.clear();
  for (const auto& c : in.children) {
    Tree kept;
    if (Prune(c, deleted, next, &kept)) out->children.push_back(std::move(kept));
  }
  return !out->children.empty();
}

}  // namespace

std::optional<Tree> ProjectTreeDeletion(const Tree& tree,
                                        const std::set<size_t>& deleted_leaves) {
  const size_t n = tree.LeafCount();
  if (!deleted_leaves.empty() && *deleted_leaves.rbegin() >= n) {
    throw Error(ErrorKind::kRange, "leaf index " + std::to_string(*deleted_leaves.rbegin()) +
                                       " out of range for a tree with " +
                                       std::to_string(n) + " leaves");
  }
  Tree out;
  size_t next = 0;
  if (!Prune(tree, deleted_leaves, &next, &out)) return std::nullopt;
  return out;
}

Document DeleteWords(const Document& doc, int level, uint64_t seed) {
  if (level < 0 || level > 100) {
    throw Error(ErrorKind::kRange,
                "alteration level " + std::to_string(level) + " outside [0, 100]");
  }
  if (doc.alteration_level != 0) {
    throw Error(ErrorKind::kRange, "document '" + doc.id + "' is already altered");
  }
  if (doc.tokens.empty()) {
    throw Error(ErrorKind::kRange, "document '" + doc.id + "' has no tokens");
  }
  Document out = doc;
  out.alteration_level = level;
  if (level == 0) return out;

  const auto removed = DeletedWordPositions(doc, level, seed);
  std::vector<bool> gone(doc.tokens.size(), false);
  for (size_t i : removed) gone[i] = true;

  out.tokens.clear();
  out.trees.clear();
  size_t start = 0;
  const auto lengths = doc.SentenceLengths();
  for (size_t s = 0; s < lengths.size(); ++s) {
    const size_t end = std::min(start + lengths[s], doc.tokens.size());
    bool has_word = false;
    for (size_t i = start; i < end; ++i) {
      has_word = has_word || (!gone[i] && IsWordForm(doc.tokens[i].form));
    }
    if (has_word) {
      std::set<size_t> local;
      for (size_t i = start; i < end; ++i) {
        if (gone[i]) {
          local.insert(i - start);
        } else {
          out.tokens.push_back(doc.tokens[i]);
        }
      }
      if (doc.HasTrees()) {
        auto projected = ProjectTreeDeletion(treepat::ParsePtb(doc.trees[s]), local);
        out.trees.push_back(treepat::Render(*projected));
      }
    }
    start = end;
  }
  std::string text;
  for (const auto& t : out.tokens) {
    if (!text.empty()) text.push_back(' ');
    text += t.form;
  }
  out.text = std::move(text);
  return out;
}

namespace {

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path MakeTemp(const char* stem) {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / (std::string(stem) + "-XXXXXX")).string();
  const int fd = mkstemp(tmpl.data());
  if (fd < 0) throw Error(ErrorKind::kIo, "cannot create a temporary file");
  close(fd);
  return tmpl;
}

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  return out + "'";
}

}  // namespace

std::vector<Tree> ReparseExternal(const std::vector<std::vector<std::string>>& sentences,
                                  const std::string& command) {
  const auto in_path = MakeTemp("lexsyn-in");
  const auto out_path = MakeTemp("lexsyn-out");
  const auto err_path = MakeTemp("lexsyn-err");
  {
    std::ofstream in(in_path, std::ios::binary);
    for (const auto& sent : sentences) {
      for (size_t i = 0; i < sent.size(); ++i) in << (i ? " " : "") << sent[i];
      in << '\n';
    }
  }
  const std::string shell = "(" + command + ") < " + ShellQuote(in_path.string()) + " > " +
                            ShellQuote(out_path.string()) + " 2> " +
                            ShellQuote(err_path.string());
  const int status = std::system(shell.c_str());
  const std::string out = ReadFile(out_path);
  const std::string err = ReadFile(err_path);
  std::error_code ec;
  std::filesystem::remove(in_path, ec);
  std::filesystem::remove(out_path, ec);
  std::filesystem::remove(err_path, ec);

  if (status != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    throw Error(ErrorKind::kExternalTool, "parser command exited with status " +
                                              std::to_string(code) + ": " + err);
  }
  std::vector<Tree> trees;
  std::istringstream lines(out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      trees.push_back(treepat::ParsePtb(line));
    } catch (const Error& e) {
      throw Error(ErrorKind::kExternalTool,
                  "parser command produced unparseable output (" + std::string(e.what()) +
                      "): " + line + (err.empty() ? "" : "\nstderr: " + err));
    }
  }
  std::vector<std::string> expected, got;
  for (const auto& s : sentences) expected.insert(expected.end(), s.begin(), s.end());
  for (const auto& t : trees) {
    const auto leaves = t.Leaves();
    got.insert(got.end(), leaves.begin(), leaves.end());
  }
  if (expected != got) {
    throw Error(ErrorKind::kAlignment,
                "parser output has " + std::to_string(got.size()) +
                    " leaves that do not match the " + std::to_string(expected.size()) +
                    " input tokens");
  }
  return trees;
}

std::map<int, Corpus> PerturbCorpus(const Corpus& corpus, const PerturbationPlan& plan,
                                    int jobs) {
  plan.Validate();
  for (const auto& d : corpus.documents) {
    if (d.alteration_level != 0) {
      throw Error(ErrorKind::kRange, "document '" + d.id + "' is already altered");
    }
  }
  std::map<int, Corpus> out;
  for (int level : plan.levels) {
    Corpus altered;
    altered.name = corpus.name;
    altered.documents.resize(corpus.documents.size());
    ParallelFor(corpus.documents.size(), jobs, [&](size_t i) {
      Document d = DeleteWords(corpus.documents[i], level, plan.seed);
      if (plan.tree_strategy == TreeStrategy::kReparse && level > 0) {
        std::vector<std::vector<std::string>> sentences;
        size_t pos = 0;
        for (size_t len : d.SentenceLengths()) {
          std::vector<std::string> s;
          for (size_t k = 0; k < len && pos < d.tokens.size(); ++k, ++pos) {
            s.push_back(d.tokens[pos].form);
          }
          sentences.push_back(std::move(s));
        }
        d.trees.clear();
        for (const auto& t : ReparseExternal(sentences, plan.parser_command)) {
          d.trees.push_back(treepat::Render(t));
        }
        // New trees carry the parser's tags.
        for (auto& t : d.tokens) t.pos.clear();
        ValidateDocument(&d, "document '" + d.id + "'");
      }
      altered.documents[i] = std::move(d);
    });
    out.emplace(level, std::move(altered));
  }
  return out;
}

}  // namespace lexsyn::perturb
