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

#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "lexsyn/common.h"
#include "lexsyn/perturb.h"
#include "test_util.h"

namespace lexsyn::synfeat {
namespace {

using treepat::ParsePtb;
using treepat::Tree;

constexpr const char* kCanonical = "(S (NP (DT the) (NN boy)) (VP (VBZ runs)))";
constexpr const char* kRelative =
    "(S (NP (DT the) (NN boy)) (VP (VBD saw) (NP (NP (DT the) (NN dog)) "
    "(SBAR (WHNP (WDT that)) (S (VP (VBD barked)))))))";
constexpr const char* kRelativeAndSubordinate =
    "(S (NP (DT the) (NN boy)) (VP (VBD saw) (NP (NP (DT the) (NN dog)) "
    "(SBAR (WHNP (WDT that)) (S (VP (VBD barked))))) "
    "(SBAR (IN because) (S (NP (PRP it)) (VP (VBD was) (ADJP (JJ loud)))))))";

std::vector<Tree> Trees(const std::vector<std::string>& texts) {
  std::vector<Tree> out;
  for (const auto& t : texts) out.push_back(WithRoot(ParsePtb(t)));
  return out;
}

// Reads the per-line golden counts; columns after `line` are
// words S VP C T DC CT CP CN.
struct GoldenRow {
  long words = 0;
  ProductionCounts counts;
};

std::vector<GoldenRow> Golden() {
  std::vector<GoldenRow> rows;
  for (const auto& line : testing::ReadLines(testing::FixturePath("treebank25_counts.tsv"))) {
    if (line.rfind("line", 0) == 0) continue;
    std::istringstream ss(line);
    int index = 0;
    GoldenRow r;
    ProductionCounts& c = r.counts;
    ss >> index >> r.words >> c.S >> c.VP >> c.C >> c.T >> c.DC >> c.CT >> c.CP >> c.CN;
    rows.push_back(r);
  }
  return rows;
}

TEST(CountProductionUnitsTest, SpecExamples) {
  const ProductionCounts one = CountProductionUnits(Trees({kCanonical}));
  EXPECT_EQ(one.S, 1);
  EXPECT_EQ(one.T, 1);
  EXPECT_EQ(one.C, 1);
  EXPECT_EQ(one.DC, 0);
  EXPECT_EQ(one.CT, 0);

  const ProductionCounts two = CountProductionUnits(Trees({kCanonical, kCanonical}));
  ProductionCounts doubled = one;
  doubled += one;
  EXPECT_EQ(two, doubled);

  const ProductionCounts rel = CountProductionUnits(Trees({kRelative}));
  EXPECT_EQ(rel.C, 2);
  EXPECT_EQ(rel.DC, 1);
  EXPECT_EQ(rel.CT, 1);
  EXPECT_EQ(rel.T, 1);
  EXPECT_EQ(CountProductionUnits({}), ProductionCounts{});
}

TEST(CountProductionUnitsTest, GoldenTreebank) {
  const auto lines = testing::ReadLines(testing::FixturePath("treebank25.mrg"));
  const auto golden = Golden();
  ASSERT_EQ(lines.size(), 25u);
  ASSERT_EQ(golden.size(), 25u);
  ProductionCounts total, expected;
  long words = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    const ProductionCounts got = CountProductionUnits(Trees({lines[i]}));
    const ProductionCounts& want = golden[i].counts;
    EXPECT_EQ(got.S, want.S) << "line " << i + 1;
    EXPECT_EQ(got.VP, want.VP) << "line " << i + 1;
    EXPECT_EQ(got.C, want.C) << "line " << i + 1;
    EXPECT_EQ(got.T, want.T) << "line " << i + 1;
    EXPECT_EQ(got.DC, want.DC) << "line " << i + 1;
    EXPECT_EQ(got.CT, want.CT) << "line " << i + 1;
    EXPECT_EQ(got.CP, want.CP) << "line " << i + 1;
    EXPECT_EQ(got.CN, want.CN) << "line " << i + 1;
    total += got;
    expected += want;
    words += golden[i].words;
  }
  EXPECT_EQ(total, expected);

  const FeatureVector r = SyntacticRatios(total, words);
  const double w = static_cast<double>(words);
  const ProductionCounts& e = expected;
  EXPECT_NEAR(*r.Get("MLS"), w / e.S, 1e-12);
  EXPECT_NEAR(*r.Get("MLT"), w / e.T, 1e-12);
  EXPECT_NEAR(*r.Get("MLC"), w / e.C, 1e-12);
  EXPECT_NEAR(*r.Get("C/S"), static_cast<double>(e.C) / e.S, 1e-12);
  EXPECT_NEAR(*r.Get("VP/T"), static_cast<double>(e.VP) / e.T, 1e-12);
  EXPECT_NEAR(*r.Get("C/T"), static_cast<double>(e.C) / e.T, 1e-12);
  EXPECT_NEAR(*r.Get("DC/C"), static_cast<double>(e.DC) / e.C, 1e-12);
  EXPECT_NEAR(*r.Get("DC/T"), static_cast<double>(e.DC) / e.T, 1e-12);
  EXPECT_NEAR(*r.Get("T/S"), static_cast<double>(e.T) / e.S, 1e-12);
  EXPECT_NEAR(*r.Get("CT/T"), static_cast<double>(e.CT) / e.T, 1e-12);
  EXPECT_NEAR(*r.Get("CP/T"), static_cast<double>(e.CP) / e.T, 1e-12);
  EXPECT_NEAR(*r.Get("CP/C"), static_cast<double>(e.CP) / e.C, 1e-12);
  EXPECT_NEAR(*r.Get("CN/T"), static_cast<double>(e.CN) / e.T, 1e-12);
  EXPECT_NEAR(*r.Get("CN/C"), static_cast<double>(e.CN) / e.C, 1e-12);
}

TEST(SyntacticRatiosTest, SpecExamples) {
  ProductionCounts c;
  c.S = 2;
  c.T = 2;
  c.C = 2;
  const FeatureVector r = SyntacticRatios(c, 16);
  EXPECT_DOUBLE_EQ(*r.Get("MLS"), 8.0);
  EXPECT_DOUBLE_EQ(*r.Get("C/S"), 1.0);
  EXPECT_DOUBLE_EQ(*r.Get("T/S"), 1.0);

  const FeatureVector zero = SyntacticRatios(ProductionCounts{}, 0);
  EXPECT_EQ(zero.size(), 14u);
  for (const auto& f : zero.features()) EXPECT_FALSE(f.value.has_value()) << f.name;
}

TEST(SyntacticRatiosTest, HealthyTranscriptClausesPerSentence) {
  std::vector<Tree> trees;
  for (const auto& line : testing::ReadLines(testing::FixturePath("transcript_healthy.mrg"))) {
    trees.push_back(WithRoot(ParsePtb(line)));
  }
  const ProductionCounts c = CountProductionUnits(trees);
  const FeatureVector r = SyntacticRatios(c, 1);
  EXPECT_NEAR(*r.Get("C/S"), 1.1, 0.15);
}

TEST(WithRootTest, WrapsOrRelabels) {
  EXPECT_EQ(WithRoot(ParsePtb(kCanonical)).label, "ROOT");
  EXPECT_EQ(WithRoot(ParsePtb(kCanonical)).children.size(), 1u);
  const Tree unlabeled = WithRoot(ParsePtb(std::string("(") + kCanonical + ")"));
  EXPECT_EQ(unlabeled.label, "ROOT");
  EXPECT_EQ(unlabeled.children[0].label, "S");
}

TEST(DLevelTest, SpecExamples) {
  const DLevel simple = DLevelClassify(WithRoot(ParsePtb(
      "(S (NP (NN mother)) (VP (VBZ is) (VP (VBG drying) (NP (DT the) (NNS dishes)))))")));
  EXPECT_EQ(simple.level, 0);
  EXPECT_TRUE(simple.rule.empty());

  const DLevel rel = DLevelClassify(WithRoot(ParsePtb(kRelative)));
  EXPECT_GE(rel.level, 1);
  EXPECT_LE(rel.level, 6);
  EXPECT_EQ(rel.rule, "object_relative_clause");

  EXPECT_EQ(DLevelClassify(WithRoot(ParsePtb(kRelativeAndSubordinate))).level, 7);
}

TEST(DLevelTest, FragmentIsFlagged) {
  const DLevel frag = DLevelClassify(WithRoot(ParsePtb("(FRAG (NP (DT the) (NN dog)))")));
  EXPECT_EQ(frag.level, 0);
  EXPECT_TRUE(frag.flagged);
}

TEST(DLevelTest, Distribution) {
  const DLevelShares simple = DLevelDistribution(Trees({kCanonical, kCanonical}));
  EXPECT_DOUBLE_EQ(*simple.p0, 1.0);
  EXPECT_DOUBLE_EQ(*simple.p1_4, 0.0);
  EXPECT_DOUBLE_EQ(*simple.p5_7, 0.0);

  const DLevelShares mixed = DLevelDistribution(Trees({kCanonical, kRelativeAndSubordinate}));
  EXPECT_DOUBLE_EQ(*mixed.p0, 0.5);
  EXPECT_DOUBLE_EQ(*mixed.p1_4, 0.0);
  EXPECT_DOUBLE_EQ(*mixed.p5_7, 0.5);

  EXPECT_FALSE(DLevelDistribution({}).p0.has_value());

  const auto lines = testing::ReadLines(testing::FixturePath("treebank25.mrg"));
  std::vector<Tree> all;
  for (const auto& l : lines) all.push_back(WithRoot(ParsePtb(l)));
  const DLevelShares s = DLevelDistribution(all);
  EXPECT_NEAR(*s.p0 + *s.p1_4 + *s.p5_7, 1.0, 1e-12);
}

TEST(DLevelRulesTest, ParsesShippedTable) {
  const auto& res = SyntaxResources::Default();
  EXPECT_FALSE(res.dlevel.rules.empty());
  EXPECT_EQ(res.dlevel.multi_level, 7);
  EXPECT_FALSE(res.Version().empty());
  EXPECT_THROW(DLevelRules::Parse("version: 1\n9 embed bad: S\n"), Error);
}

TEST(ExtractSyntacticTest, MissingTreesNamesDocument) {
  Document d;
  d.id = "no-trees";
  d.tokens = {{"dog", "NN"}};
  try {
    ExtractSyntactic(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTreesRequired);
    EXPECT_NE(std::string(e.what()).find("no-trees"), std::string::npos);
  }
}

TEST(ExtractSyntacticTest, TwoTreeGoldenVector) {
  const Document d = testing::DocumentFromTrees("d", "a", {kCanonical, kRelative});
  const FeatureVector v = ExtractSyntactic(d);
  ASSERT_EQ(v.size(), SyntacticFeatureNames().size());
  // 3 + 7 words; the relative clause adds one dependent clause.
  EXPECT_DOUBLE_EQ(*v.Get("S"), 2);
  EXPECT_DOUBLE_EQ(*v.Get("VP"), 3);
  EXPECT_DOUBLE_EQ(*v.Get("C"), 3);
  EXPECT_DOUBLE_EQ(*v.Get("T"), 2);
  EXPECT_DOUBLE_EQ(*v.Get("DC"), 1);
  EXPECT_DOUBLE_EQ(*v.Get("CT"), 1);
  EXPECT_DOUBLE_EQ(*v.Get("CP"), 0);
  EXPECT_DOUBLE_EQ(*v.Get("MLS"), 10.0 / 2.0);
  EXPECT_DOUBLE_EQ(*v.Get("C/S"), 3.0 / 2.0);
  EXPECT_DOUBLE_EQ(*v.Get("DC/C"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*v.Get("dlevel_0"), 0.5);
  EXPECT_DOUBLE_EQ(*v.Get("dlevel_1_4"), 0.5);
}

TEST(ExtractSyntacticTest, IdentityPerturbationAndSelfConcatenation) {
  const auto lines = testing::ReadLines(testing::FixturePath("treebank25.mrg"));
  const Document d = testing::DocumentFromTrees("d", "a", {lines[3], lines[13], lines[19]});
  const FeatureVector base = ExtractSyntactic(d);

  const Document same = perturb::DeleteWords(d, 0, 1);
  const FeatureVector again = ExtractSyntactic(same);
  for (size_t i = 0; i < base.size(); ++i) EXPECT_EQ(again.features()[i].value, base.features()[i].value);

  const Document twice = testing::DocumentFromTrees("d2", "a", {lines[3], lines[13], lines[19], lines[3], lines[13], lines[19]});
  const FeatureVector doubled = ExtractSyntactic(twice);
  for (const auto& name : {"S", "VP", "C", "T", "DC", "CT", "CP", "CN"}) {
    EXPECT_DOUBLE_EQ(*doubled.Get(name), 2 * *base.Get(name)) << name;
  }
  for (size_t i = 8; i < base.size(); ++i) {
    const auto& a = base.features()[i].value;
    const auto& b = doubled.features()[i].value;
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) EXPECT_NEAR(*a, *b, 1e-12) << base.features()[i].name;
  }
}

}  // namespace
}  // namespace lexsyn::synfeat
