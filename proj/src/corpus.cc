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

#include "lexsyn/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lexsyn/csv.h"
#include "lexsyn/treepat.h"

namespace lexsyn {

using ordered_json = nlohmann::ordered_json;

bool IsWordForm(std::string_view form) {
  return std::any_of(form.begin(), form.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) ||
           (static_cast<unsigned char>(c) & 0x80);
  });
}

bool IsSentenceTerminal(std::string_view form) {
  return !form.empty() && std::all_of(form.begin(), form.end(), [](char c) {
    return c == '.' || c == '?' || c == '!';
  });
}

namespace {

constexpr std::string_view kEdgePunct = ".,?!;:\"()";

bool IsChatMarker(const std::string& tok) {
  return tok == "(.)" || tok == "(..)" || tok == "(...)" || tok == "xxx" ||
         tok == "yyy" || tok == "www" || tok[0] == '+';
}

}  // namespace

std::vector<std::string> TokenizeText(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  int bracket_depth = 0;
  for (char c : text) {
    if (c == '[') {
      ++bracket_depth;
      continue;
    }
    if (c == ']') {
      if (bracket_depth > 0) --bracket_depth;
      cleaned.push_back(' ');
      continue;
    }
    if (bracket_depth > 0) continue;
    if (c == '<' || c == '>') {
      cleaned.push_back(' ');
      continue;
    }
    cleaned.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }

  std::vector<std::string> out;
  std::istringstream in(cleaned);
  std::string tok;
  while (in >> tok) {
    if (IsChatMarker(tok)) continue;
    size_t b = 0;
    while (b < tok.size() && kEdgePunct.find(tok[b]) != std::string_view::npos) {
      out.emplace_back(1, tok[b]);
      ++b;
    }
    if (b == tok.size()) continue;
    size_t e = tok.size();
    while (e > b && kEdgePunct.find(tok[e - 1]) != std::string_view::npos) --e;
    out.push_back(tok.substr(b, e - b));
    for (size_t i = e; i < tok.size(); ++i) out.emplace_back(1, tok[i]);
  }
  return out;
}

bool Document::IsTagged() const {
  return std::all_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return !t.pos.empty(); });
}

size_t Document::WordCount() const {
  return static_cast<size_t>(std::count_if(
      tokens.begin(), tokens.end(),
      [](const Token& t) { return IsWordForm(t.form); }));
}

std::vector<size_t> Document::SentenceLengths() const {
  std::vector<size_t> lengths;
  if (HasTrees()) {
    for (const auto& t : trees) {
      lengths.push_back(treepat::ParsePtb(t).LeafCount());
    }
    return lengths;
  }
  size_t current = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    ++current;
    const bool terminal = IsSentenceTerminal(tokens[i].form);
    const bool next_terminal =
        i + 1 < tokens.size() && IsSentenceTerminal(tokens[i + 1].form);
    if (terminal && !next_terminal) {
      lengths.push_back(current);
      current = 0;
    }
  }
  if (current > 0) lengths.push_back(current);
  return lengths;
}

std::vector<std::vector<std::string>> Document::SentenceForms() const {
  std::vector<std::vector<std::string>> out;
  size_t pos = 0;
  for (size_t len : SentenceLengths()) {
    std::vector<std::string> sent;
    for (size_t i = 0; i < len && pos < tokens.size(); ++i, ++pos) {
      std::string f = tokens[pos].form;
      for (auto& c : f) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      sent.push_back(std::move(f));
    }
    out.push_back(std::move(sent));
  }
  return out;
}

std::vector<std::string> Corpus::Labels() const {
  std::set<std::string> labels;
  for (const auto& d : documents) labels.insert(d.label);
  return {labels.begin(), labels.end()};
}

std::vector<int> Corpus::LabelIndices() const {
  const auto labels = Labels();
  std::vector<int> out;
  out.reserve(documents.size());
  for (const auto& d : documents) {
    out.push_back(static_cast<int>(
        std::find(labels.begin(), labels.end(), d.label) - labels.begin()));
  }
  return out;
}

const Document& Corpus::Find(std::string_view id) const {
  for (const auto& d : documents)
    if (d.id == id) return d;
  throw Error(ErrorKind::kMismatch, "no document '" + std::string(id) + "'");
}

CorpusFormat ParseCorpusFormat(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "csv") return CorpusFormat::kCsv;
  throw Error(ErrorKind::kConfig, "unknown corpus format '" + std::string(name) + "'");
}

void ValidateDocument(Document* doc, const std::string& where) {
  if (doc->id.empty()) throw Error(ErrorKind::kSchema, where + ": empty id");
  if (doc->label.empty()) throw Error(ErrorKind::kSchema, where + ": empty label");
  if (doc->subject_id.empty()) doc->subject_id = doc->id;
  if (doc->alteration_level < 0 || doc->alteration_level > 100) {
    throw Error(ErrorKind::kRange, where + ": alteration_level outside [0,100]");
  }
  for (const auto& t : doc->tokens) {
    if (t.form.empty()) throw Error(ErrorKind::kSchema, where + ": empty token form");
  }
  if (doc->HasTrees()) {
    std::vector<Token> leaves;
    for (size_t i = 0; i < doc->trees.size(); ++i) {
      treepat::Tree tree;
      try {
        tree = treepat::ParsePtb(doc->trees[i]);
      } catch (const Error& e) {
        throw Error(ErrorKind::kParse,
                    where + ": tree " + std::to_string(i) + ": " + e.what());
      }
      auto forms = tree.Leaves();
      auto tags = tree.Tags();
      for (size_t j = 0; j < forms.size(); ++j) leaves.push_back({forms[j], tags[j]});
    }
    if (doc->tokens.empty()) {
      doc->tokens = std::move(leaves);
    } else {
      if (leaves.size() != doc->tokens.size()) {
        throw Error(ErrorKind::kAlignment,
                    where + ": trees have " + std::to_string(leaves.size()) +
                        " leaves but the document has " +
                        std::to_string(doc->tokens.size()) + " tokens");
      }
      for (size_t j = 0; j < leaves.size(); ++j) {
        if (leaves[j].form != doc->tokens[j].form) {
          throw Error(ErrorKind::kAlignment,
                      where + ": leaf " + std::to_string(j) + " '" +
                          leaves[j].form + "' differs from token '" +
                          doc->tokens[j].form + "'");
        }
        if (doc->tokens[j].pos.empty()) doc->tokens[j].pos = leaves[j].pos;
      }
    }
  } else if (doc->tokens.empty()) {
    for (auto& f : TokenizeText(doc->text)) doc->tokens.push_back({std::move(f), ""});
  }
  if (doc->WordCount() == 0) {
    throw Error(ErrorKind::kSchema, where + ": document has no word tokens");
  }
}

void ValidateCorpus(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& d : corpus.documents) {
    if (!ids.insert(d.id).second) {
      throw Error(ErrorKind::kSchema, "duplicate document id '" + d.id + "'");
    }
  }
  const auto labels = corpus.Labels();
  if (labels.size() != 2) {
    throw Error(ErrorKind::kSchema, "corpus must have exactly 2 labels, found " +
                                        std::to_string(labels.size()));
  }
}

namespace {

std::string RequireString(const ordered_json& obj, const char* key,
                          const std::string& where, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) {
      throw Error(ErrorKind::kSchema, where + ": missing field '" + key + "'");
    }
    return "";
  }
  if (!it->is_string()) {
    throw Error(ErrorKind::kSchema, where + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

Document DocumentFromJson(const ordered_json& obj, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::kParse, where + ": expected a JSON object");
  Document d;
  d.id = RequireString(obj, "id", where, true);
  d.subject_id = RequireString(obj, "subject_id", where, false);
  d.label = RequireString(obj, "label", where, true);
  d.text = RequireString(obj, "text", where, false);
  if (auto it = obj.find("tokens"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorKind::kSchema, where + ": tokens must be an array");
    for (const auto& t : *it) {
      if (!t.is_object()) throw Error(ErrorKind::kSchema, where + ": token must be an object");
      d.tokens.push_back({RequireString(t, "form", where, true),
                          RequireString(t, "pos", where, false)});
    }
  }
  if (auto it = obj.find("trees"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorKind::kSchema, where + ": trees must be an array");
    for (const auto& t : *it) {
      if (!t.is_string()) throw Error(ErrorKind::kSchema, where + ": tree must be a string");
      d.trees.push_back(t.get<std::string>());
    }
  }
  if (auto it = obj.find("alteration_level"); it != obj.end()) {
    if (!it->is_number_integer()) {
      throw Error(ErrorKind::kSchema, where + ": alteration_level must be an integer");
    }
    d.alteration_level = it->get<int>();
  }
  if (d.text.empty() && d.tokens.empty() && d.trees.empty()) {
    throw Error(ErrorKind::kSchema, where + ": record has no text, tokens or trees");
  }
  return d;
}

void CheckLabelCount(std::set<std::string>* labels, const std::string& label,
                     const std::string& where) {
  labels->insert(label);
  if (labels->size() > 2) {
    throw Error(ErrorKind::kSchema, where + ": third distinct label '" + label + "'");
  }
}

}  // namespace

Corpus ParseCorpus(std::string_view content, CorpusFormat format, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::set<std::string> labels;
  if (format == CorpusFormat::kJsonl) {
    std::istringstream in{std::string(content)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string where = "line " + std::to_string(lineno);
      ordered_json obj;
      try {
        obj = ordered_json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kParse, where + ": " + e.what());
      }
      Document d = DocumentFromJson(obj, where);
      CheckLabelCount(&labels, d.label, where);
      ValidateDocument(&d, where);
      corpus.documents.push_back(std::move(d));
    }
  } else {
    auto records = ParseCsv(content);
    if (records.empty()) throw Error(ErrorKind::kSchema, "empty CSV corpus");
    std::map<std::string, size_t> col;
    for (size_t i = 0; i < records[0].size(); ++i) col[records[0][i]] = i;
    for (const char* key : {"id", "label", "text"}) {
      if (!col.count(key)) {
        throw Error(ErrorKind::kSchema, std::string("CSV header lacks column '") + key + "'");
      }
    }
    for (size_t r = 1; r < records.size(); ++r) {
      const std::string where = "record " + std::to_string(r + 1);
      const auto& rec = records[r];
      if (rec.size() != records[0].size()) {
        throw Error(ErrorKind::kParse, where + ": expected " +
                                           std::to_string(records[0].size()) +
                                           " fields, found " + std::to_string(rec.size()));
      }
      Document d;
      d.id = rec[col["id"]];
      d.label = rec[col["label"]];
      d.text = rec[col["text"]];
      if (col.count("subject_id")) d.subject_id = rec[col["subject_id"]];
      CheckLabelCount(&labels, d.label, where);
      ValidateDocument(&d, where);
      corpus.documents.push_back(std::move(d));
    }
  }
  ValidateCorpus(corpus);
  return corpus;
}

Corpus LoadCorpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open corpus " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseCorpus(buf.str(), format, path.stem().string());
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents) {
    ordered_json obj;
    obj["id"] = d.id;
    obj["subject_id"] = d.subject_id;
    obj["label"] = d.label;
    if (!d.text.empty()) obj["text"] = d.text;
    ordered_json toks = ordered_json::array();
    for (const auto& t : d.tokens) {
      ordered_json tok;
      tok["form"] = t.form;
      if (!t.pos.empty()) tok["pos"] = t.pos;
      toks.push_back(std::move(tok));
    }
    obj["tokens"] = std::move(toks);
    if (!d.trees.empty()) obj["trees"] = d.trees;
    obj["alteration_level"] = d.alteration_level;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

int FoldAssignment::FoldOf(const std::string& doc_id) const {
  auto it = fold_of.find(doc_id);
  if (it == fold_of.end()) {
    throw Error(ErrorKind::kMismatch, "document '" + doc_id + "' has no fold");
  }
  return it->second;
}

FoldAssignment GroupFolds(const Corpus& corpus, int k, uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::kConfig, "fold count must be at least 2");
  const auto label_idx = corpus.LabelIndices();

  struct Subject {
    std::string id;
    std::vector<size_t> docs;
    int label = 0;
  };
  std::map<std::string, Subject> by_id;
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    auto& s = by_id[corpus.documents[i].subject_id];
    s.id = corpus.documents[i].subject_id;
    s.docs.push_back(i);
  }
  if (static_cast<int>(by_id.size()) < k) {
    throw Error(ErrorKind::kConfig, "only " + std::to_string(by_id.size()) +
                                        " subjects for " + std::to_string(k) + " folds");
  }
  std::vector<Subject> subjects;
  for (auto& [id, s] : by_id) {
    int ones = 0;
    for (size_t d : s.docs) ones += label_idx[d];
    s.label = 2 * ones > static_cast<int>(s.docs.size()) ? 1 : 0;
    subjects.push_back(std::move(s));
  }
  Rng rng(DeriveSeed(seed, "group_folds"));
  rng.Shuffle(subjects);
  std::stable_sort(subjects.begin(), subjects.end(),
                   [](const Subject& a, const Subject& b) {
                     return a.docs.size() > b.docs.size();
                   });
  std::vector<const Subject*> queue[2];
  for (const auto& s : subjects) queue[s.label].push_back(&s);

  std::vector<size_t> weight(k, 0);
  std::vector<std::array<size_t, 2>> class_weight(k, {0, 0});
  FoldAssignment out;
  out.k = k;
  size_t next[2] = {0, 0};
  int turn = 0;
  while (next[0] < queue[0].size() || next[1] < queue[1].size()) {
    if (next[turn] >= queue[turn].size()) turn = 1 - turn;
    const Subject* s = queue[turn][next[turn]++];
    int best = 0;
    for (int f = 1; f < k; ++f) {
      if (weight[f] < weight[best] ||
          (weight[f] == weight[best] &&
           class_weight[f][s->label] < class_weight[best][s->label])) {
        best = f;
      }
    }
    weight[best] += s->docs.size();
    class_weight[best][s->label] += s->docs.size();
    for (size_t d : s->docs) out.fold_of[corpus.documents[d].id] = best;
    turn = 1 - turn;
  }

  std::array<size_t, 2> total{0, 0};
  std::vector<std::array<size_t, 2>> per_fold(k, {0, 0});
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    ++total[label_idx[i]];
    ++per_fold[out.fold_of[corpus.documents[i].id]][label_idx[i]];
  }
  for (int f = 0; f < k; ++f) {
    for (int c = 0; c < 2; ++c) {
      if (total[c] == per_fold[f][c]) {
        throw Error(ErrorKind::kConfig,
                    "training split for fold " + std::to_string(f) +
                        " would lack class '" + corpus.Labels()[c] + "'");
      }
    }
  }
  return out;
}

}  // namespace lexsyn
