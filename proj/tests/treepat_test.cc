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

#include <gtest/gtest.h>

#include <string>

#include "lexsyn/common.h"

namespace lexsyn::treepat {
namespace {

constexpr const char* kCanonical = "(S (NP (DT the) (NN boy)) (VP (VBZ runs)))";

size_t Count(const char* pattern, const char* tree) {
  return MatchPattern(ParsePattern(pattern), ParsePtb(tree)).size();
}

TEST(ParsePtbTest, SingleLeaf) {
  const Tree t = ParsePtb("(NN dog)");
  EXPECT_TRUE(t.IsLeaf());
  EXPECT_EQ(t.label, "NN");
  EXPECT_EQ(t.form, "dog");
}

TEST(ParsePtbTest, CanonicalTree) {
  const Tree t = ParsePtb(kCanonical);
  EXPECT_EQ(t.label, "S");
  EXPECT_EQ(t.LeafCount(), 3u);
  EXPECT_EQ(t.Leaves(), (std::vector<std::string>{"the", "boy", "runs"}));
  EXPECT_EQ(t.Tags(), (std::vector<std::string>{"DT", "NN", "VBZ"}));
}

TEST(ParsePtbTest, ErrorNamesOffset) {
  try {
    ParsePtb("((S");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("offset 3"), std::string::npos) << e.what();
  }
}

TEST(ParsePtbTest, RejectsMalformed) {
  for (const char* bad : {"", "()", "(S (NP (DT the))", "(S (NP x)) extra", "NN dog"}) {
    EXPECT_THROW(ParsePtb(bad), Error) << bad;
  }
}

TEST(ParsePtbTest, RenderRoundTrip) {
  const std::string messy = "( S\n  (NP (DT the)   (NN boy))\t(VP (VBZ runs)) )";
  const Tree t = ParsePtb(messy);
  EXPECT_EQ(Render(t), kCanonical);
  EXPECT_EQ(Render(ParsePtb(Render(t))), kCanonical);
}

TEST(MatchPatternTest, LabelMatch) {
  EXPECT_EQ(Count("VP", kCanonical), 1u);
  EXPECT_EQ(Count("NP < NN", kCanonical), 1u);
}

TEST(MatchPatternTest, DominanceVersusImmediateDominance) {
  EXPECT_EQ(Count("S << VBZ", kCanonical), 1u);
  EXPECT_EQ(Count("S < VBZ", kCanonical), 0u);
}

TEST(MatchPatternTest, PrefixWildcardAndAlternatives) {
  EXPECT_EQ(Count("VB*", kCanonical), 1u);
  EXPECT_EQ(Count("DT|NN", kCanonical), 2u);
  EXPECT_EQ(Count("__", kCanonical), 6u);
}

TEST(MatchPatternTest, LeftmostChildAndNegation) {
  EXPECT_EQ(Count("NP <, DT", kCanonical), 1u);
  EXPECT_EQ(Count("NP <, NN", kCanonical), 0u);
  EXPECT_EQ(Count("S !<< JJ", kCanonical), 1u);
  EXPECT_EQ(Count("S !<< DT", kCanonical), 0u);
  EXPECT_EQ(Count("S !< VBZ", kCanonical), 1u);
}

TEST(MatchPatternTest, TagWordAlternative) {
  const char* tree = "(S (NP (PRP I)) (VP (VBP think) (SBAR (IN that) (S (NP (PRP it)) (VP (VBZ works))))))";
  EXPECT_EQ(Count("SBAR < IN/that", tree), 1u);
  EXPECT_EQ(Count("SBAR < IN/because", tree), 0u);
}

TEST(MatchPatternTest, CapturesAreUnionedInPreorder) {
  const Tree t = ParsePtb(kCanonical);
  const Pattern p = ParsePattern("S < =n (NP|VP)");
  const auto nodes = CapturedNodes(p, t);
  ASSERT_EQ(nodes.size(), 2u);
  EXPECT_EQ(nodes[0]->label, "NP");
  EXPECT_EQ(nodes[1]->label, "VP");
}

TEST(ParsePatternTest, RejectsMalformed) {
  for (const char* bad : {"", "S <", "S < (NP", "S ?? NP"}) {
    EXPECT_THROW(ParsePattern(bad), Error) << bad;
  }
}

TEST(PatternFileTest, RepeatedNamesAreAlternatives) {
  const PatternFile f = PatternFile::Parse("# units\nversion: 3\nX: NP\nY: VP\nX: S\n");
  EXPECT_EQ(f.version, "3");
  EXPECT_EQ(f.order, (std::vector<std::string>{"X", "Y"}));
  EXPECT_EQ(f.Get("X").size(), 2u);
  EXPECT_EQ(CapturedUnion(f.Get("X"), ParsePtb(kCanonical)).size(), 2u);
  EXPECT_THROW(f.Get("Z"), Error);
}

}  // namespace
}  // namespace lexsyn::treepat
