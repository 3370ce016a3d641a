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


#include "lexsyn/models.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lexsyn/common.h"
#include "lexsyn/synth.h"

namespace lexsyn::models {
namespace {

const std::vector<ModelKind> kAllKinds{ModelKind::kGnb, ModelKind::kRf, ModelKind::kSvm,
                                       ModelKind::kMlp};

// Two Gaussian blobs in `d` dimensions, class means at -mu and +mu.
void Blobs(int per_class, int d, double mu, uint64_t seed, Matrix* x, std::vector<int>* y) {
  Rng rng(seed);
  *x = Matrix(0, d);
  y->clear();
  std::vector<double> row(d);
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < per_class; ++i) {
      for (auto& v : row) v = (c ? mu : -mu) + rng.Normal();
      x->AppendRow(row.data());
      y->push_back(c);
    }
  }
}

TEST(MacroF1Test, HandCases) {
  EXPECT_DOUBLE_EQ(MacroF1({0, 1, 1, 0}, {0, 1, 1, 0}), 1.0);
  EXPECT_NEAR(MacroF1({0, 0, 1, 1}, {0, 1, 0, 1}), 0.5, 1e-12);
  EXPECT_NEAR(MacroF1({0, 0, 0, 1}, {0, 0, 0, 0}), 3.0 / 7.0, 1e-12);
  EXPECT_THROW(MacroF1({0, 1}, {0}), Error);
  EXPECT_THROW(MacroF1({}, {}), Error);
}

TEST(SmoteTest, BalancedInputIsUnchanged) {
  const Matrix x = Matrix::FromRows({{0, 0}, {1, 1}, {5, 5}, {6, 6}});
  const std::vector<int> y{0, 0, 1, 1};
  const auto [xs, ys] = SmoteOversample(x, y, 5, 1);
  EXPECT_EQ(xs.data, x.data);
  EXPECT_EQ(ys, y);
}

TEST(SmoteTest, SingleSyntheticPointLiesOnSegment) {
  const Matrix x = Matrix::FromRows({{0, 0}, {1, 1}, {9, 9}, {8, 8}, {7, 9}});
  const std::vector<int> y{0, 0, 1, 1, 1};
  const auto [xs, ys] = SmoteOversample(x, y, 5, 3);
  ASSERT_EQ(xs.rows, 6u);
  EXPECT_EQ(ys.back(), 0);
  const double t = xs(5, 0);
  EXPECT_DOUBLE_EQ(xs(5, 1), t);
  EXPECT_GT(t, 0.0);
  EXPECT_LT(t, 1.0);
}

TEST(SmoteTest, MinorityTenMajorityThirty) {
  Matrix x;
  std::vector<int> y;
  Blobs(30, 3, 2.0, 5, &x, &y);
  // Keep the first 10 rows of class 0.
  std::vector<size_t> keep;
  for (size_t i = 0; i < 10; ++i) keep.push_back(i);
  for (size_t i = 30; i < 60; ++i) keep.push_back(i);
  const Matrix xm = x.SelectRows(keep);
  std::vector<int> ym(10, 0);
  ym.insert(ym.end(), 30, 1);
  const auto [xs, ys] = SmoteOversample(xm, ym, 5, 17);
  ASSERT_EQ(xs.rows, 60u);
  int zeros = 0;
  for (int v : ys) zeros += v == 0;
  EXPECT_EQ(zeros, 30);

  // Each synthetic row is a + t (b - a) for a minority row a and one of its
  // 5 nearest minority neighbours b.
  for (size_t s = 40; s < 60; ++s) {
    ASSERT_EQ(ys[s], 0);
    bool on_segment = false;
    for (size_t a = 0; a < 10 && !on_segment; ++a) {
      std::vector<std::pair<double, size_t>> dist;
      for (size_t b = 0; b < 10; ++b) {
        if (b == a) continue;
        double d = 0;
        for (size_t c = 0; c < 3; ++c) d += std::pow(xm(a, c) - xm(b, c), 2);
        dist.push_back({d, b});
      }
      std::sort(dist.begin(), dist.end());
      for (size_t k = 0; k < 5 && !on_segment; ++k) {
        const size_t b = dist[k].second;
        const double t = (xs(s, 0) - xm(a, 0)) / (xm(b, 0) - xm(a, 0));
        if (!(t > 0 && t < 1)) continue;
        bool ok = true;
        for (size_t c = 1; c < 3; ++c) {
          ok &= std::abs(xm(a, c) + t * (xm(b, c) - xm(a, c)) - xs(s, c)) < 1e-9;
        }
        on_segment = ok;
      }
    }
    EXPECT_TRUE(on_segment) << "synthetic row " << s;
  }
}

TEST(SmoteTest, DegenerateInputs) {
  const Matrix one = Matrix::FromRows({{0}, {1}, {2}});
  EXPECT_THROW(SmoteOversample(one, {1, 1, 1}, 5, 0), Error);
  const auto [xs, ys] = SmoteOversample(one, {0, 1, 1}, 5, 0);
  EXPECT_EQ(xs.rows, 4u);
  EXPECT_EQ(xs(3, 0), 0.0);
}

TEST(TrainTest, SeparableBlobsAreLearnedByEveryModel) {
  Matrix x;
  std::vector<int> y;
  Blobs(60, 2, 2.0, 1, &x, &y);
  for (ModelKind kind : kAllKinds) {
    const Model m = Train(ModelSpec::Defaults(kind, 3), x, y);
    const auto pred = m.Predict(x);
    ASSERT_EQ(pred.size(), y.size());
    EXPECT_GE(MacroF1(y, pred), 0.95) << ModelKindName(kind);

    Matrix test;
    std::vector<int> ytest;
    Blobs(100, 2, 2.0, 99, &test, &ytest);
    const auto tp = m.Predict(test);
    int correct = 0;
    for (size_t i = 0; i < tp.size(); ++i) correct += tp[i] == ytest[i];
    EXPECT_GE(correct / 200.0, 0.9) << ModelKindName(kind);
  }
}

TEST(TrainTest, DeterministicUnderSeed) {
  Matrix x;
  std::vector<int> y;
  Blobs(40, 4, 0.5, 2, &x, &y);
  for (ModelKind kind : kAllKinds) {
    const auto a = Train(ModelSpec::Defaults(kind, 8), x, y).Predict(x);
    const auto b = Train(ModelSpec::Defaults(kind, 8), x, y).Predict(x);
    EXPECT_EQ(a, b) << ModelKindName(kind);
  }
}

TEST(TrainTest, GaussianNbUsesEqualPriors) {
  // Both classes have unit variance and means -1 / +1 in either set.
  const Matrix balanced = Matrix::FromRows({{-2}, {0}, {0}, {2}});
  const std::vector<int> yb{0, 0, 1, 1};
  std::vector<std::vector<double>> rows;
  std::vector<int> yi;
  for (int r = 0; r < 9; ++r) {
    rows.push_back({-2});
    rows.push_back({0});
    yi.push_back(0);
    yi.push_back(0);
  }
  rows.push_back({0});
  rows.push_back({2});
  yi.push_back(1);
  yi.push_back(1);
  const ModelSpec spec = ModelSpec::Defaults(ModelKind::kGnb, 0);
  const Model a = Train(spec, balanced, yb);
  const Model b = Train(spec, Matrix::FromRows(rows), yi);
  Matrix grid(0, 1);
  for (double v = -3.0; v <= 3.0; v += 0.05) grid.AppendRow(&v);
  EXPECT_EQ(a.Predict(grid), b.Predict(grid));
}

TEST(TrainTest, ZeroVarianceColumnIsDropped) {
  const Matrix x = Matrix::FromRows({{0, 5}, {1, 5}, {3, 5}, {4, 5}});
  const Model m = Train(ModelSpec::Defaults(ModelKind::kGnb, 0), x, {0, 0, 1, 1});
  EXPECT_EQ(m.dropped_columns(), (std::vector<size_t>{1}));
  EXPECT_EQ(m.Metadata()["dropped_columns"].size(), 1u);
}

TEST(TrainTest, ErrorsAndEdgeCases) {
  const Matrix x = Matrix::FromRows({{0, 1}, {1, 0}});
  try {
    Train(ModelSpec::Defaults(ModelKind::kGnb, 0), x, {1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
  EXPECT_THROW(Train(ModelSpec::Defaults(ModelKind::kGnb, 0), x, {0}), Error);
  const Model m = Train(ModelSpec::Defaults(ModelKind::kSvm, 0), x, {0, 1});
  EXPECT_TRUE(m.Predict(Matrix(0, 2)).empty());
  try {
    m.Predict(Matrix(1, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
  }
}

TEST(TrainTest, ForestDepthsRespectLimit) {
  Matrix x;
  std::vector<int> y;
  Blobs(50, 3, 0.3, 4, &x, &y);
  const Model m = Train(ModelSpec::Defaults(ModelKind::kRf, 1), x, y);
  const auto depths = ForestDepths(m);
  EXPECT_EQ(depths.size(), 100u);
  for (int d : depths) EXPECT_LE(d, 5);
}

TEST(ModelSpecTest, JsonRoundTrip) {
  ModelSpec s = ModelSpec::Defaults(ModelKind::kSvm, 42);
  s.svm_gamma = 0.25;
  const ModelSpec back = ModelSpec::FromJson(s.ToJson());
  EXPECT_EQ(back.ToJson().dump(), s.ToJson().dump());
  EXPECT_THROW(ParseModelKind("knn"), Error);
}

TEST(CrossValidateTest, SeparableAndDeterministic) {
  synth::BlobOptions o;
  o.documents = 200;
  o.subjects = 20;
  o.seed = 6;
  const FeatureTable table = synth::MakeBlobTable(o);
  const FoldAssignment folds = GroupFoldsForTable(table, 10, 1);
  for (ModelKind kind : {ModelKind::kGnb, ModelKind::kRf}) {
    const CVResult a = CrossValidate(table, folds, ModelSpec::Defaults(kind, 2), 1);
    const CVResult b = CrossValidate(table, folds, ModelSpec::Defaults(kind, 2), 4);
    EXPECT_GE(a.mean_f1, 0.9) << ModelKindName(kind);
    EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
    EXPECT_EQ(a.folds.size(), 10u);
    EXPECT_EQ(CVResult::FromJson(a.ToJson()).ToJson().dump(), a.ToJson().dump());
  }
}

TEST(CrossValidateTest, ShuffledLabelsAreNearChance) {
  double sum = 0.0;
  for (uint64_t seed = 0; seed < 3; ++seed) {
    synth::BlobOptions o;
    o.documents = 200;
    o.subjects = 20;
    o.shuffle_labels = true;
    o.seed = seed;
    const FeatureTable table = synth::MakeBlobTable(o);
    const CVResult r = CrossValidate(table, GroupFoldsForTable(table, 10, seed),
                                     ModelSpec::Defaults(ModelKind::kGnb, seed));
    sum += r.mean_f1;
  }
  EXPECT_GE(sum / 3, 0.3);
  EXPECT_LE(sum / 3, 0.7);
}

TEST(CrossValidateTest, SingleClassTrainingFoldIsSkipped) {
  FeatureTable t;
  // Subject s0 holds every "b" document, so its fold trains on "a" only.
  for (int i = 0; i < 6; ++i) {
    FeatureVector v;
    v.Add("x", FeatureGroup::kLexical, i);
    t.AddRow("d" + std::to_string(i), i < 2 ? "s0" : "s" + std::to_string(i), i < 2 ? "b" : "a", v);
  }
  FoldAssignment f;
  f.k = 3;
  for (int i = 0; i < 6; ++i) f.fold_of["d" + std::to_string(i)] = i < 2 ? 0 : 1 + i % 2;
  const CVResult r = CrossValidate(t, f, ModelSpec::Defaults(ModelKind::kGnb, 0));
  ASSERT_EQ(r.folds.size(), 3u);
  EXPECT_TRUE(r.folds[0].skipped);
  EXPECT_FALSE(r.folds[0].reason.empty());
  EXPECT_FALSE(r.folds[1].skipped);
  EXPECT_FALSE(r.folds[2].skipped);
  EXPECT_DOUBLE_EQ(r.mean_f1, (r.folds[1].f1 + r.folds[2].f1) / 2);
}

}  // namespace
}  // namespace lexsyn::models
