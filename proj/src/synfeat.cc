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

#include "lexsyn/synfeat.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "lexsyn/embedded_data.h"

namespace lexsyn::synfeat {

using treepat::Tree;

ProductionCounts& ProductionCounts::operator+=(const ProductionCounts& o) {
  S += o.S;
  VP += o.VP;
  C += o.C;
  T += o.T;
  DC += o.DC;
  CT += o.CT;
  CP += o.CP;
  CN += o.CN;
  return *this;
}

DLevelRules DLevelRules::Parse(std::string_view text) {
  DLevelRules out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool have_multi = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    const std::string where = "D-level rules line " + std::to_string(lineno);
    if (colon == std::string::npos) throw Error(ErrorKind::kParse, where + ": missing ':'");
    std::istringstream head(line.substr(0, colon));
    std::string body = line.substr(colon + 1);
    std::string first;
    head >> first;
    if (first == "version") {
      std::istringstream b(body);
      b >> out.version;
      continue;
    }
    DLevelRule rule;
    std::string kind;
    try {
      rule.level = std::stoi(first);
    } catch (...) {
      throw Error(ErrorKind::kParse, where + ": level must be an integer");
    }
    head >> kind >> rule.name;
    if (rule.level < 0 || rule.level > 7 || rule.name.empty()) {
      throw Error(ErrorKind::kParse, where + ": expected 'LEVEL KIND NAME: PATTERN'");
    }
    if (kind == "multi") {
      out.multi_level = rule.level;
      try {
        out.multi_threshold = std::stoi(body);
      } catch (...) {
        throw Error(ErrorKind::kParse, where + ": multi threshold must be an integer");
      }
      have_multi = true;
      continue;
    }
    if (kind != "embed" && kind != "plain") {
      throw Error(ErrorKind::kParse, where + ": unknown rule kind '" + kind + "'");
    }
    rule.embed = kind == "embed";
    rule.pattern = treepat::ParsePattern(body);
    out.rules.push_back(std::move(rule));
  }
  if (out.version.empty()) throw Error(ErrorKind::kParse, "D-level rules have no version line");
  if (!have_multi) throw Error(ErrorKind::kParse, "D-level rules lack a multi rule");
  std::stable_sort(out.rules.begin(), out.rules.end(),
                   [](const DLevelRule& a, const DLevelRule& b) { return a.level > b.level; });
  return out;
}

const SyntaxResources& SyntaxResources::Default() {
  static const SyntaxResources kDefault =
      FromText(data::ProductionUnitPatterns(), data::DLevelRuleTable());
  return kDefault;
}

SyntaxResources SyntaxResources::FromText(std::string_view units_text,
                                          std::string_view dlevel_text) {
  SyntaxResources r;
  r.units = treepat::PatternFile::Parse(units_text);
  for (const char* name : {"S", "VP", "C", "T", "DC", "CT", "CP", "CN"}) r.units.Get(name);
  r.dlevel = DLevelRules::Parse(dlevel_text);
  return r;
}

std::string SyntaxResources::Version() const {
  return "units-v" + units.version + "/dlevel-v" + dlevel.version;
}

Tree WithRoot(Tree tree) {
  if (tree.label == "ROOT") return tree;
  if (tree.label.empty() && !tree.IsLeaf()) {
    tree.label = "ROOT";
    return tree;
  }
  Tree root;
  root.label = "ROOT";
  root.children.push_back(std::move(tree));
  return root;
}

ProductionCounts CountProductionUnits(const std::vector<Tree>& trees,
                                      const SyntaxResources& res) {
  ProductionCounts total;
  auto count = [&](const Tree& t, const char* name) {
    return static_cast<int>(treepat::CapturedUnion(res.units.Get(name), t).size());
  };
  for (const auto& raw : trees) {
    const Tree t = WithRoot(raw);
    ProductionCounts c;
    c.S = count(t, "S");
    c.VP = count(t, "VP");
    c.C = count(t, "C");
    c.T = count(t, "T");
    c.DC = count(t, "DC");
    c.CT = count(t, "CT");
    c.CP = count(t, "CP");
    c.CN = count(t, "CN");
    total += c;
  }
  return total;
}

FeatureVector SyntacticRatios(const ProductionCounts& c, long word_count) {
  auto ratio = [](double num, int den) -> Value {
    if (den == 0) return std::nullopt;
    return num / den;
  };
  const double w = static_cast<double>(word_count);
  const auto G = FeatureGroup::kSyntactic;
  FeatureVector v;
  v.Add("MLS", G, ratio(w, c.S));
  v.Add("MLT", G, ratio(w, c.T));
  v.Add("MLC", G, ratio(w, c.C));
  v.Add("C/S", G, ratio(c.C, c.S));
  v.Add("VP/T", G, ratio(c.VP, c.T));
  v.Add("C/T", G, ratio(c.C, c.T));
  v.Add("DC/C", G, ratio(c.DC, c.C));
  v.Add("DC/T", G, ratio(c.DC, c.T));
  v.Add("T/S", G, ratio(c.T, c.S));
  v.Add("CT/T", G, ratio(c.CT, c.T));
  v.Add("CP/T", G, ratio(c.CP, c.T));
  v.Add("CP/C", G, ratio(c.CP, c.C));
  v.Add("CN/T", G, ratio(c.CN, c.T));
  v.Add("CN/C", G, ratio(c.CN, c.C));
  return v;
}

DLevel DLevelClassify(const Tree& raw, const SyntaxResources& res) {
  const Tree tree = WithRoot(raw);
  DLevel out;
  static const treepat::Pattern kClauseNode =
      treepat::ParsePattern("S|SINV|SQ|SBARQ|SBAR");
  out.flagged = treepat::MatchPattern(kClauseNode, tree).empty();

  std::set<const Tree*> embedded;
  std::vector<std::pair<int, std::string>> hits;  // (level, rule) that matched
  for (const auto& rule : res.dlevel.rules) {
    auto nodes = treepat::CapturedNodes(rule.pattern, tree);
    if (nodes.empty()) continue;
    hits.emplace_back(rule.level, rule.name);
    if (rule.embed) embedded.insert(nodes.begin(), nodes.end());
  }
  if (static_cast<int>(embedded.size()) >= res.dlevel.multi_threshold) {
    out.level = res.dlevel.multi_level;
    out.rule = "multiple_embeddings";
    return out;
  }
  // Rules are sorted by descending level, so the first hit is the highest.
  if (!hits.empty()) {
    out.level = hits.front().first;
    out.rule = hits.front().second;
  }
  return out;
}

DLevelShares DLevelDistribution(const std::vector<Tree>& trees,
                                const SyntaxResources& res) {
  DLevelShares s;
  if (trees.empty()) return s;
  int n0 = 0, n14 = 0, n57 = 0;
  for (const auto& t : trees) {
    const int level = DLevelClassify(t, res).level;
    if (level == 0) {
      ++n0;
    } else if (level <= 4) {
      ++n14;
    } else {
      ++n57;
    }
  }
  const double n = static_cast<double>(trees.size());
  s.p0 = n0 / n;
  s.p1_4 = n14 / n;
  s.p5_7 = n57 / n;
  return s;
}

FeatureVector ExtractSyntactic(const Document& doc, const SyntaxResources& res) {
  if (!doc.HasTrees()) {
    throw Error(ErrorKind::kTreesRequired, "document '" + doc.id + "' has no parse trees");
  }
  std::vector<Tree> trees;
  trees.reserve(doc.trees.size());
  for (const auto& s : doc.trees) trees.push_back(treepat::ParsePtb(s));
  const auto c = CountProductionUnits(trees, res);
  const auto G = FeatureGroup::kSyntactic;
  FeatureVector v;
  v.Add("S", G, c.S);
  v.Add("VP", G, c.VP);
  v.Add("C", G, c.C);
  v.Add("T", G, c.T);
  v.Add("DC", G, c.DC);
  v.Add("CT", G, c.CT);
  v.Add("CP", G, c.CP);
  v.Add("CN", G, c.CN);
  v.Append(SyntacticRatios(c, static_cast<long>(doc.WordCount())));
  const auto shares = DLevelDistribution(trees, res);
  v.Add("dlevel_0", G, shares.p0);
  v.Add("dlevel_1_4", G, shares.p1_4);
  v.Add("dlevel_5_7", G, shares.p5_7);
  return v;
}

const std::vector<std::string>& SyntacticFeatureNames() {
  static const std::vector<std::string> kNames{
      "S",    "VP",   "C",    "T",    "DC",   "CT",   "CP",
      "CN",   "MLS",  "MLT",  "MLC",  "C/S",  "VP/T", "C/T",
      "DC/C", "DC/T", "T/S",  "CT/T", "CP/T", "CP/C", "CN/T",
      "CN/C", "dlevel_0", "dlevel_1_4", "dlevel_5_7"};
  return kNames;
}

}  // namespace lexsyn::synfeat
