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

// Feature-change z-scores, F1 deltas, the importance regression and
// Kruskal-Wallis significance ranks.

#ifndef LEXSYN_STATS_H_
#define LEXSYN_STATS_H_

#include <optional>
#include <string>
#include <vector>

#include "lexsyn/features.h"

namespace lexsyn::stats {

// Per-document z values of an altered table against the unaltered one.
struct ZScoreTable {
  int level = 0;
  std::vector<std::string> names;  // features kept (non-zero baseline sigma)
  std::vector<FeatureGroup> groups;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<Value>> z;  // z[doc][feature]
  std::vector<double> mean;           // baseline mean per kept feature
  std::vector<double> sigma;          // baseline population sigma
  std::vector<std::string> excluded;  // zero-sigma or undefined features

  std::string ToCsv() const;
};

// z = (x - mu0) / sigma0 with mu0 and the population sigma0 over all
// baseline documents. Features whose baseline sigma is zero (or that have
// no defined baseline value) are excluded and listed. Throws
// Error(kMismatch) when documents or feature names differ.
ZScoreTable FeatureZscores(const FeatureTable& baseline, const FeatureTable& altered);

// How per-document z values become one number per group.
//   kShift     |z^x - z^0| per document, the standardized distance each
//              document moved from its own unaltered value (0 at level 0)
//   kAbsolute  |z^x|
//   kSigned    z^x
enum class Aggregation { kShift, kAbsolute, kSigned };
// kFeatureThenDocument averages over a document's group features, then over
// documents; kPooled averages over every (document, feature) cell.
enum class AggregationOrder { kFeatureThenDocument, kPooled };

Aggregation ParseAggregation(std::string_view name);
const char* AggregationName(Aggregation a);
AggregationOrder ParseAggregationOrder(std::string_view name);
const char* AggregationOrderName(AggregationOrder o);

struct GroupZ {
  int level = 0;
  double lexical = 0.0;
  double syntactic = 0.0;
  int n_lexical = 0;
  int n_syntactic = 0;
};

// `baseline_z` is the level-0 table (the baseline against itself) and is
// required for kShift. Absent cells are skipped. Throws Error(kDegenerate)
// when a group has no usable feature.
GroupZ GroupZscore(const ZScoreTable& z, const ZScoreTable* baseline_z,
                   Aggregation aggregation = Aggregation::kShift,
                   AggregationOrder order = AggregationOrder::kFeatureThenDocument);

// F1_x - F1_0. Throws Error(kRange) when either score is outside [0, 1].
double F1Delta(double f1_altered, double f1_baseline);

struct ImportanceFit {
  double alpha = 0.0;  // syntactic coefficient
  double beta = 0.0;   // lexical coefficient
  std::optional<double> ratio;  // alpha / beta; absent when beta == 0
  bool sign_disagreement = false;
  std::vector<double> residuals;
};

// Least squares of delta_f1 = alpha * z_syn + beta * z_lex without an
// intercept. Throws Error(kDegenerate) for fewer than two points or a
// rank-deficient design, and Error(kDimension) on length mismatch.
ImportanceFit FitImportance(const std::vector<double>& delta_f1,
                            const std::vector<double>& z_syntactic,
                            const std::vector<double>& z_lexical);

struct KruskalWallisResult {
  double h = 0.0;
  double p = 1.0;
};

// Two-group Kruskal-Wallis H with average ranks and tie correction; p from
// the chi-square distribution with one degree of freedom. Throws
// Error(kDegenerate) when a group is empty.
KruskalWallisResult KruskalWallis(const std::vector<double>& a, const std::vector<double>& b);

struct RankEntry {
  std::string name;
  FeatureGroup group = FeatureGroup::kLexical;
  double h = 0.0;
  double p = 1.0;
  int rank = 0;  // 1 = smallest p
  bool significant = false;
};

struct RankTable {
  int level = 0;
  double threshold = 0.05;
  std::vector<RankEntry> entries;  // table column order

  const RankEntry& Get(const std::string& name) const;
};

// Kruskal-Wallis per feature between the two classes (absent values
// skipped); ranks ascend by p with ties broken by feature name. A feature
// with a class lacking values gets p = 1. Throws Error(kDegenerate) when a
// class has fewer than two documents.
RankTable RankFeatures(const FeatureTable& table, double threshold = 0.05, int jobs = 1);

struct RankDelta {
  std::string name;
  FeatureGroup group = FeatureGroup::kLexical;
  int base_rank = 0;
  int altered_rank = 0;
  int delta = 0;  // base_rank - altered_rank; positive means the rank improved
  bool base_significant = false;
  bool altered_significant = false;
};

struct GroupRankSummary {
  FeatureGroup group = FeatureGroup::kLexical;
  int max_increase = 0;
  // Share of baseline-significant features that are insignificant after
  // alteration; absent when the group has none.
  Value became_insignificant;
};

struct RankDeltaTable {
  int level = 0;
  std::vector<RankDelta> deltas;
  std::vector<GroupRankSummary> summary;
};

// Throws Error(kMismatch) when the feature sets differ.
RankDeltaTable RankDeltas(const RankTable& baseline, const RankTable& altered);

// Cell colour for a rank-change heatmap: "white" when the feature was not
// significant at baseline; otherwise "blue" for large rises, "red" for
// large drops (at least half of the largest |delta| among significant
// cells) and "yellow" for small changes.
std::string HeatmapColor(const RankDelta& cell, int max_abs_delta);

}  // namespace lexsyn::stats

#endif  // LEXSYN_STATS_H_
