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


#include "lexsyn/stats.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lexsyn/common.h"
#include "lexsyn/features.h"

namespace lexsyn::stats {
namespace {

struct Column {
  std::string name;
  FeatureGroup group;
  std::vector<Value> values;
};

FeatureTable Table(const std::vector<Column>& cols, const std::vector<std::string>& labels,
                   int level = 0) {
  FeatureTable t;
  t.level = level;
  for (size_t d = 0; d < labels.size(); ++d) {
    FeatureVector v;
    for (const auto& c : cols) v.Add(c.name, c.group, c.values[d]);
    t.AddRow("d" + std::to_string(d), "s" + std::to_string(d), labels[d], v);
  }
  return t;
}

const auto L = FeatureGroup::kLexical;
const auto S = FeatureGroup::kSyntactic;

TEST(FeatureZscoresTest, HandComputedTable) {
  // Baseline x = {1, 2, 3}: mean 2, population sigma sqrt(2/3).
  const FeatureTable base = Table({{"x", L, {1.0, 2.0, 3.0}}, {"k", S, {4.0, 4.0, 4.0}}},
                                  {"a", "b", "a"});
  const double sigma = std::sqrt(2.0 / 3.0);
  const FeatureTable alt =
      Table({{"x", L, {2.0, 2.0 + 2 * sigma, 0.5}}, {"k", S, {1.0, 1.0, 1.0}}},
            {"a", "b", "a"}, 40);
  const ZScoreTable z = FeatureZscores(base, alt);
  EXPECT_EQ(z.level, 40);
  ASSERT_EQ(z.names, (std::vector<std::string>{"x"}));
  EXPECT_EQ(z.excluded, (std::vector<std::string>{"k"}));
  EXPECT_NEAR(*z.z[0][0], 0.0, 1e-12);
  EXPECT_NEAR(*z.z[1][0], 2.0, 1e-12);
  EXPECT_NEAR(*z.z[2][0], (0.5 - 2.0) / sigma, 1e-12);
  EXPECT_NEAR(z.sigma[0], sigma, 1e-12);
}

TEST(FeatureZscoresTest, AbsentValuesAndMismatch) {
  const FeatureTable base = Table({{"x", L, {1.0, 3.0, std::nullopt}}}, {"a", "b", "a"});
  const FeatureTable alt = Table({{"x", L, {std::nullopt, 3.0, 5.0}}}, {"a", "b", "a"});
  const ZScoreTable z = FeatureZscores(base, alt);
  EXPECT_FALSE(z.z[0][0].has_value());
  EXPECT_NEAR(*z.z[2][0], 3.0, 1e-12);
  const FeatureTable other = Table({{"y", L, {1.0, 3.0, 2.0}}}, {"a", "b", "a"});
  try {
    FeatureZscores(base, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMismatch);
  }
}

TEST(FeatureZscoresTest, InvariantUnderAffineRescaling) {
  const std::vector<std::string> labels{"a", "b", "a", "b", "a"};
  const std::vector<double> b{1, 4, 2, 8, 5}, a{0, 3, 3, 9, 1};
  std::vector<Value> b1, a1, b2, a2;
  for (size_t i = 0; i < b.size(); ++i) {
    b1.push_back(b[i]);
    a1.push_back(a[i]);
    b2.push_back(3.5 * b[i] - 7);
    a2.push_back(3.5 * a[i] - 7);
  }
  const ZScoreTable z1 = FeatureZscores(Table({{"x", L, b1}}, labels), Table({{"x", L, a1}}, labels));
  const ZScoreTable z2 = FeatureZscores(Table({{"x", L, b2}}, labels), Table({{"x", L, a2}}, labels));
  for (size_t d = 0; d < b.size(); ++d) EXPECT_NEAR(*z1.z[d][0], *z2.z[d][0], 1e-12);
}

ZScoreTable Constant(double lex, double syn, int docs = 4) {
  ZScoreTable z;
  z.names = {"l1", "l2", "s1"};
  z.groups = {L, L, S};
  for (int d = 0; d < docs; ++d) {
    z.doc_ids.push_back("d" + std::to_string(d));
    z.z.push_back({lex, -lex, syn});
  }
  z.mean = {0, 0, 0};
  z.sigma = {1, 1, 1};
  return z;
}

TEST(GroupZscoreTest, SpecExamples) {
  const ZScoreTable zero = Constant(0, 0);
  const GroupZ g0 = GroupZscore(zero, &zero);
  EXPECT_DOUBLE_EQ(g0.lexical, 0.0);
  EXPECT_DOUBLE_EQ(g0.syntactic, 0.0);

  const GroupZ g = GroupZscore(Constant(2, 1), &zero);
  EXPECT_DOUBLE_EQ(g.lexical, 2.0);
  EXPECT_DOUBLE_EQ(g.syntactic, 1.0);
  EXPECT_EQ(g.n_lexical, 2);
  EXPECT_EQ(g.n_syntactic, 1);

  const GroupZ a = GroupZscore(Constant(2, 1), nullptr, Aggregation::kAbsolute);
  EXPECT_DOUBLE_EQ(a.lexical, 2.0);
  const GroupZ s = GroupZscore(Constant(2, 1), nullptr, Aggregation::kSigned);
  EXPECT_DOUBLE_EQ(s.lexical, 0.0);
  EXPECT_DOUBLE_EQ(s.syntactic, 1.0);
}

TEST(GroupZscoreTest, ShiftIsZeroAgainstItself) {
  const ZScoreTable z = Constant(1.7, -0.4);
  const GroupZ g = GroupZscore(z, &z);
  EXPECT_DOUBLE_EQ(g.lexical, 0.0);
  EXPECT_DOUBLE_EQ(g.syntactic, 0.0);
  EXPECT_THROW(GroupZscore(z, nullptr, Aggregation::kShift), Error);
}

TEST(GroupZscoreTest, EmptyGroupIsDegenerate) {
  ZScoreTable z = Constant(1, 1);
  z.names = {"l1"};
  z.groups = {L};
  for (auto& row : z.z) row = {1.0};
  try {
    GroupZscore(z, nullptr, Aggregation::kAbsolute);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
}

TEST(GroupZscoreTest, OrdersDifferWhenDocumentsHaveGaps) {
  ZScoreTable z;
  z.names = {"l1", "l2", "s1"};
  z.groups = {L, L, S};
  z.doc_ids = {"a", "b"};
  z.z = {{1.0, 3.0, 1.0}, {5.0, std::nullopt, 1.0}};
  const GroupZ fd = GroupZscore(z, nullptr, Aggregation::kAbsolute,
                                AggregationOrder::kFeatureThenDocument);
  const GroupZ pooled = GroupZscore(z, nullptr, Aggregation::kAbsolute, AggregationOrder::kPooled);
  EXPECT_DOUBLE_EQ(fd.lexical, (2.0 + 5.0) / 2);
  EXPECT_DOUBLE_EQ(pooled.lexical, 3.0);
}

TEST(F1DeltaTest, Examples) {
  EXPECT_DOUBLE_EQ(F1Delta(0.7, 0.7), 0.0);
  EXPECT_NEAR(F1Delta(0.6, 0.8), -0.2, 1e-15);
  EXPECT_THROW(F1Delta(1.2, 0.5), Error);
  EXPECT_THROW(F1Delta(0.5, -0.1), Error);
}

TEST(FitImportanceTest, RecoversPlantedCoefficients) {
  const std::vector<double> zs{0.1, 0.3, 0.4, 0.9}, zl{0.5, 0.2, 0.8, 1.1};
  std::vector<double> d;
  for (size_t i = 0; i < zs.size(); ++i) d.push_back(2 * zs[i] + zl[i]);
  const ImportanceFit f = FitImportance(d, zs, zl);
  EXPECT_NEAR(f.alpha, 2.0, 1e-9);
  EXPECT_NEAR(f.beta, 1.0, 1e-9);
  EXPECT_NEAR(*f.ratio, 2.0, 1e-9);
  EXPECT_FALSE(f.sign_disagreement);
  for (double r : f.residuals) EXPECT_NEAR(r, 0.0, 1e-9);
}

TEST(FitImportanceTest, SignDisagreementIsFlagged) {
  const std::vector<double> zs{0.1, 0.3, 0.4}, zl{0.5, 0.2, 0.8};
  std::vector<double> d;
  for (size_t i = 0; i < zs.size(); ++i) d.push_back(-zs[i] + zl[i]);
  EXPECT_TRUE(FitImportance(d, zs, zl).sign_disagreement);
}

TEST(FitImportanceTest, DegenerateDesigns) {
  auto kind = [](const std::vector<double>& d, const std::vector<double>& s,
                 const std::vector<double>& l) {
    try {
      FitImportance(d, s, l);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  EXPECT_EQ(kind({-0.1, -0.2, -0.3}, {0.1, 0.2, 0.3}, {0.2, 0.4, 0.6}), ErrorKind::kDegenerate);
  EXPECT_EQ(kind({-0.1, -0.2, -0.3}, {0.1, 0.2, 0.3}, {0, 0, 0}), ErrorKind::kDegenerate);
  EXPECT_EQ(kind({-0.1}, {0.1}, {0.2}), ErrorKind::kDegenerate);
  EXPECT_EQ(kind({-0.1, 0.2}, {0.1}, {0.2, 0.3}), ErrorKind::kDimension);
}

TEST(KruskalWallisTest, HandCases) {
  const KruskalWallisResult r = KruskalWallis({1, 2, 3}, {4, 5, 6});
  EXPECT_NEAR(r.h, 3.857, 1e-3);
  EXPECT_NEAR(r.p, 0.0495, 1e-3);
  const KruskalWallisResult same = KruskalWallis({2, 2, 2}, {2, 2});
  EXPECT_DOUBLE_EQ(same.h, 0.0);
  EXPECT_DOUBLE_EQ(same.p, 1.0);
  EXPECT_THROW(KruskalWallis({}, {1}), Error);
}

TEST(KruskalWallisTest, TieCorrection) {
  // Ranks: 1, 2.5, 2.5 | 4, 5. Uncorrected H = 3.5; ties {2,2} give
  // C = 1 - 6 / 120 = 0.95.
  const KruskalWallisResult r = KruskalWallis({1, 2, 2}, {3, 4});
  const double uncorrected = 12.0 / 30.0 * (3 * std::pow(2.0 - 3.0, 2) + 2 * std::pow(4.5 - 3.0, 2));
  EXPECT_NEAR(r.h, uncorrected / 0.95, 1e-12);
}

TEST(KruskalWallisTest, NullPValuesAreUniform) {
  Rng rng(123);
  std::vector<double> p;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(30), b(30);
    for (auto& v : a) v = rng.Normal();
    for (auto& v : b) v = rng.Normal();
    p.push_back(KruskalWallis(a, b).p);
  }
  std::sort(p.begin(), p.end());
  double d = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    d = std::max({d, std::abs(p[i] - static_cast<double>(i) / p.size()),
                  std::abs(p[i] - static_cast<double>(i + 1) / p.size())});
  }
  EXPECT_LT(d, 0.05);
}

TEST(RankFeaturesTest, SeparatingFeatureRanksFirstAndTiesFollowNames) {
  Rng rng(9);
  std::vector<std::string> labels;
  std::vector<Value> sep, noise, twin_a, constant;
  for (int i = 0; i < 40; ++i) {
    labels.push_back(i % 2 ? "b" : "a");
    sep.push_back(i % 2 ? 10.0 + i : -10.0 - i);
    noise.push_back(rng.Normal());
    constant.push_back(1.0);
  }
  twin_a = noise;
  const FeatureTable t = Table({{"zz_noise", L, twin_a},
                                {"constant", S, constant},
                                {"sep", S, sep},
                                {"aa_noise", L, noise}},
                               labels);
  const RankTable r = RankFeatures(t, 0.05);
  EXPECT_EQ(r.Get("sep").rank, 1);
  EXPECT_TRUE(r.Get("sep").significant);
  EXPECT_EQ(r.Get("aa_noise").rank + 1, r.Get("zz_noise").rank);
  EXPECT_EQ(r.Get("constant").rank, 4);
  EXPECT_DOUBLE_EQ(r.Get("constant").p, 1.0);
  EXPECT_EQ(RankFeatures(t, 0.05, 4).entries.size(), 4u);
}

TEST(RankFeaturesTest, PermutedLabelsGiveNominalFalsePositiveRate) {
  Rng rng(77);
  int significant = 0, total = 0;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Column> cols;
    for (int f = 0; f < 20; ++f) {
      Column c{"f" + std::to_string(f), L, {}};
      for (int i = 0; i < 40; ++i) c.values.push_back(rng.Normal());
      cols.push_back(c);
    }
    std::vector<std::string> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i < 20 ? "a" : "b");
    rng.Shuffle(labels);
    for (const auto& e : RankFeatures(Table(cols, labels)).entries) {
      significant += e.significant;
      ++total;
    }
  }
  const double rate = static_cast<double>(significant) / total;
  EXPECT_GT(rate, 0.01);
  EXPECT_LT(rate, 0.10);
}

RankTable Ranks(const std::vector<std::pair<std::string, int>>& entries,
                const std::vector<bool>& significant) {
  RankTable t;
  for (size_t i = 0; i < entries.size(); ++i) {
    RankEntry e;
    e.name = entries[i].first;
    e.rank = entries[i].second;
    e.significant = significant[i];
    t.entries.push_back(e);
  }
  return t;
}

TEST(RankDeltasTest, Examples) {
  const RankTable base = Ranks({{"a", 10}, {"b", 1}, {"c", 3}}, {true, true, false});
  const RankDeltaTable same = RankDeltas(base, base);
  for (const auto& d : same.deltas) EXPECT_EQ(d.delta, 0);

  const RankTable moved = Ranks({{"a", 3}, {"b", 2}, {"c", 10}}, {true, false, false});
  const RankDeltaTable r = RankDeltas(base, moved);
  EXPECT_EQ(r.deltas[0].delta, 7);
  EXPECT_EQ(r.deltas[1].delta, -1);
  EXPECT_EQ(r.deltas[2].delta, -7);
  ASSERT_FALSE(r.summary.empty());
  EXPECT_EQ(r.summary[0].group, FeatureGroup::kLexical);
  EXPECT_EQ(r.summary[0].max_increase, 7);
  EXPECT_DOUBLE_EQ(*r.summary[0].became_insignificant, 0.5);

  const RankTable other = Ranks({{"a", 1}, {"x", 2}, {"c", 3}}, {true, true, true});
  EXPECT_THROW(RankDeltas(base, other), Error);
}

TEST(RankDeltasTest, DestroyedFeatureHasTheMinimumDelta) {
  Rng rng(5);
  std::vector<std::string> labels;
  std::vector<Column> base_cols, alt_cols;
  for (int f = 0; f < 6; ++f) {
    base_cols.push_back({"f" + std::to_string(f), L, {}});
    alt_cols.push_back({"f" + std::to_string(f), L, {}});
  }
  for (int i = 0; i < 60; ++i) {
    const int y = i % 2;
    labels.push_back(y ? "b" : "a");
    for (int f = 0; f < 6; ++f) {
      const double signal = 0.4 * (f + 1) * y + rng.Normal();
      base_cols[f].values.push_back(signal);
      // Feature 5 carries the strongest signal until deletion removes it.
      alt_cols[f].values.push_back(f == 5 ? rng.Normal() : signal);
    }
  }
  const RankDeltaTable r = RankDeltas(RankFeatures(Table(base_cols, labels)),
                                      RankFeatures(Table(alt_cols, labels)));
  const auto lowest = std::min_element(r.deltas.begin(), r.deltas.end(),
                                       [](const auto& a, const auto& b) { return a.delta < b.delta; });
  EXPECT_EQ(lowest->name, "f5");
}

TEST(HeatmapColorTest, Bands) {
  RankDelta cell;
  cell.base_significant = false;
  cell.delta = 9;
  EXPECT_EQ(HeatmapColor(cell, 10), "white");
  cell.base_significant = true;
  EXPECT_EQ(HeatmapColor(cell, 10), "blue");
  cell.delta = -5;
  EXPECT_EQ(HeatmapColor(cell, 10), "red");
  cell.delta = 4;
  EXPECT_EQ(HeatmapColor(cell, 10), "yellow");
  cell.delta = 0;
  EXPECT_EQ(HeatmapColor(cell, 0), "yellow");
}

}  // namespace
}  // namespace lexsyn::stats
