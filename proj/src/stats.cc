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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "lexsyn/csv.h"

namespace lexsyn::stats {

// --- z-scores -----------------------------------------------------------------

std::string ZScoreTable::ToCsv() const {
  CsvWriter w;
  std::vector<std::string> header{"id"};
  header.insert(header.end(), names.begin(), names.end());
  w.Row(header);
  std::vector<std::string> group_row{"#group"};
  for (auto g : groups) group_row.push_back(FeatureGroupName(g));
  w.Row(group_row);
  for (size_t d = 0; d < doc_ids.size(); ++d) {
    std::vector<std::string> row{doc_ids[d]};
    for (const auto& v : z[d]) row.push_back(FormatValue(v));
    w.Row(row);
  }
  return w.str();
}

ZScoreTable FeatureZscores(const FeatureTable& baseline, const FeatureTable& altered) {
  if (baseline.names != altered.names) {
    throw Error(ErrorKind::kMismatch, "baseline and altered tables have different features");
  }
  if (baseline.doc_ids != altered.doc_ids) {
    throw Error(ErrorKind::kMismatch, "baseline and altered tables have different documents");
  }
  ZScoreTable out;
  out.level = altered.level;
  out.doc_ids = altered.doc_ids;
  std::vector<size_t> kept;
  for (size_t f = 0; f < baseline.names.size(); ++f) {
    // Sorted accumulation keeps the mean independent of document order.
    std::vector<double> vals;
    for (const auto& row : baseline.rows) {
      if (row[f]) vals.push_back(*row[f]);
    }
    if (vals.empty()) {
      out.excluded.push_back(baseline.names[f]);
      continue;
    }
    std::sort(vals.begin(), vals.end());
    const double mu = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    std::vector<double> sq;
    for (double v : vals) sq.push_back((v - mu) * (v - mu));
    std::sort(sq.begin(), sq.end());
    const double sigma = std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) / vals.size());
    if (!(sigma > 0.0)) {
      out.excluded.push_back(baseline.names[f]);
      continue;
    }
    kept.push_back(f);
    out.names.push_back(baseline.names[f]);
    out.groups.push_back(baseline.groups[f]);
    out.mean.push_back(mu);
    out.sigma.push_back(sigma);
  }
  out.z.resize(altered.rows.size());
  for (size_t d = 0; d < altered.rows.size(); ++d) {
    out.z[d].resize(kept.size());
    for (size_t k = 0; k < kept.size(); ++k) {
      const Value& v = altered.rows[d][kept[k]];
      if (v) out.z[d][k] = (*v - out.mean[k]) / out.sigma[k];
    }
  }
  return out;
}

Aggregation ParseAggregation(std::string_view name) {
  if (name == "shift") return Aggregation::kShift;
  if (name == "absolute") return Aggregation::kAbsolute;
  if (name == "signed") return Aggregation::kSigned;
  throw Error(ErrorKind::kConfig, "unknown aggregation '" + std::string(name) +
                                      "' (expected shift, absolute or signed)");
}

const char* AggregationName(Aggregation a) {
  switch (a) {
    case Aggregation::kShift: return "shift";
    case Aggregation::kAbsolute: return "absolute";
    case Aggregation::kSigned: return "signed";
  }
  return "?";
}

AggregationOrder ParseAggregationOrder(std::string_view name) {
  if (name == "feature_then_document") return AggregationOrder::kFeatureThenDocument;
  if (name == "pooled") return AggregationOrder::kPooled;
  throw Error(ErrorKind::kConfig, "unknown aggregation order '" + std::string(name) +
                                      "' (expected feature_then_document or pooled)");
}

const char* AggregationOrderName(AggregationOrder o) {
  return o == AggregationOrder::kPooled ? "pooled" : "feature_then_document";
}

namespace {

double SortedMean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

}  // namespace

GroupZ GroupZscore(const ZScoreTable& z, const ZScoreTable* baseline_z,
                   Aggregation aggregation, AggregationOrder order) {
  if (aggregation == Aggregation::kShift) {
    if (baseline_z == nullptr) {
      throw Error(ErrorKind::kConfig, "shift aggregation needs the baseline z table");
    }
    if (baseline_z->names != z.names || baseline_z->doc_ids != z.doc_ids) {
      throw Error(ErrorKind::kMismatch, "baseline z table does not match the altered one");
    }
  }
  GroupZ out;
  out.level = z.level;
  for (FeatureGroup g : {FeatureGroup::kLexical, FeatureGroup::kSyntactic}) {
    std::vector<size_t> cols;
    for (size_t f = 0; f < z.names.size(); ++f) {
      if (z.groups[f] == g) cols.push_back(f);
    }
    if (cols.empty()) {
      throw Error(ErrorKind::kDegenerate,
                  std::string("no usable ") + FeatureGroupName(g) + " features for z aggregation");
    }
    auto cell = [&](size_t d, size_t f) -> Value {
      const Value& v = z.z[d][f];
      if (!v) return std::nullopt;
      switch (aggregation) {
        case Aggregation::kShift: {
          const Value& b = baseline_z->z[d][f];
          if (!b) return std::nullopt;
          return std::fabs(*v - *b);
        }
        case Aggregation::kAbsolute: return std::fabs(*v);
        case Aggregation::kSigned: return *v;
      }
      return std::nullopt;
    };
    std::vector<double> acc;
    for (size_t d = 0; d < z.doc_ids.size(); ++d) {
      std::vector<double> doc;
      for (size_t f : cols) {
        if (auto c = cell(d, f)) doc.push_back(*c);
      }
      if (doc.empty()) continue;
      if (order == AggregationOrder::kPooled) {
        acc.insert(acc.end(), doc.begin(), doc.end());
      } else {
        acc.push_back(SortedMean(std::move(doc)));
      }
    }
    const double value = acc.empty() ? 0.0 : SortedMean(std::move(acc));
    if (g == FeatureGroup::kLexical) {
      out.lexical = value;
      out.n_lexical = static_cast<int>(cols.size());
    } else {
      out.syntactic = value;
      out.n_syntactic = static_cast<int>(cols.size());
    }
  }
  return out;
}

double F1Delta(double f1_altered, double f1_baseline) {
  for (double v : {f1_altered, f1_baseline}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kRange, "F1 score " + FormatDouble(v) + " outside [0, 1]");
    }
  }
  return f1_altered - f1_baseline;
}

// --- importance regression ----------------------------------------------------

ImportanceFit FitImportance(const std::vector<double>& delta_f1,
                            const std::vector<double>& z_syntactic,
                            const std::vector<double>& z_lexical) {
  const size_t n = delta_f1.size();
  if (z_syntactic.size() != n || z_lexical.size() != n) {
    throw Error(ErrorKind::kDimension, "importance fit inputs differ in length");
  }
  if (n < 2) throw Error(ErrorKind::kDegenerate, "importance fit needs at least two levels");
  double ss = 0, sl = 0, ll = 0, sd = 0, ld = 0;
  for (size_t i = 0; i < n; ++i) {
    ss += z_syntactic[i] * z_syntactic[i];
    sl += z_syntactic[i] * z_lexical[i];
    ll += z_lexical[i] * z_lexical[i];
    sd += z_syntactic[i] * delta_f1[i];
    ld += z_lexical[i] * delta_f1[i];
  }
  // Singular values of the design are the square roots of the Gram
  // matrix's eigenvalues.
  const double tr = ss + ll, det = ss * ll - sl * sl;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  const double eig_max = tr / 2 + disc;
  const double eig_min = std::max(0.0, tr / 2 - disc);
  if (!(eig_max > 0) || std::sqrt(eig_min) <= 1e-9 * std::sqrt(eig_max) || det <= 0) {
    throw Error(ErrorKind::kDegenerate,
                "importance fit design is rank deficient; no coefficient ratio");
  }
  ImportanceFit fit;
  fit.alpha = (sd * ll - ld * sl) / det;
  fit.beta = (ss * ld - sl * sd) / det;
  for (size_t i = 0; i < n; ++i) {
    fit.residuals.push_back(delta_f1[i] - fit.alpha * z_syntactic[i] - fit.beta * z_lexical[i]);
  }
  if (fit.beta != 0.0) {
    fit.ratio = fit.alpha / fit.beta;
    if (*fit.ratio < 0) {
      fit.sign_disagreement = true;
      Warn("importance fit: coefficients disagree in sign (ratio " + FormatDouble(*fit.ratio) +
           ")");
    }
  }
  return fit;
}

// --- Kruskal-Wallis -------------------------------------------------------------

KruskalWallisResult KruskalWallis(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kDegenerate, "Kruskal-Wallis needs two non-empty groups");
  }
  std::vector<std::pair<double, int>> pooled;
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());
  const double n = static_cast<double>(pooled.size());
  double rank_sum[2] = {0, 0};
  double ties = 0;
  for (size_t i = 0; i < pooled.size();) {
    size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) rank_sum[pooled[k].second] += avg;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  KruskalWallisResult r;
  const double correction = 1.0 - ties / (n * n * n - n);
  if (correction <= 0.0) return r;  // every value identical
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double h = 12.0 / (n * (n + 1)) *
                       (rank_sum[0] * rank_sum[0] / na + rank_sum[1] * rank_sum[1] / nb) -
                   3.0 * (n + 1);
  r.h = std::max(0.0, h / correction);
  r.p = std::erfc(std::sqrt(r.h / 2.0));
  return r;
}

// --- ranks ------------------------------------------------------------------------

const RankEntry& RankTable::Get(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  throw Error(ErrorKind::kMismatch, "rank table has no feature '" + name + "'");
}

RankTable RankFeatures(const FeatureTable& table, double threshold, int jobs) {
  const std::set<std::string> labels(table.labels.begin(), table.labels.end());
  if (labels.size() != 2) {
    throw Error(ErrorKind::kDegenerate, "ranking needs exactly two classes");
  }
  const std::string first = *labels.begin();
  const auto count0 = std::count(table.labels.begin(), table.labels.end(), first);
  const auto count1 = static_cast<long>(table.labels.size()) - count0;
  if (count0 < 2 || count1 < 2) {
    throw Error(ErrorKind::kDegenerate, "ranking needs at least two documents per class");
  }
  RankTable out;
  out.level = table.level;
  out.threshold = threshold;
  out.entries.resize(table.names.size());
  ParallelFor(table.names.size(), jobs, [&](size_t f) {
    std::vector<double> a, b;
    for (size_t d = 0; d < table.rows.size(); ++d) {
      if (!table.rows[d][f]) continue;
      (table.labels[d] == first ? a : b).push_back(*table.rows[d][f]);
    }
    RankEntry& e = out.entries[f];
    e.name = table.names[f];
    e.group = table.groups[f];
    if (!a.empty() && !b.empty()) {
      const auto kw = KruskalWallis(a, b);
      e.h = kw.h;
      e.p = kw.p;
    }
    e.significant = e.p < threshold;
  });
  std::vector<size_t> order(out.entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    const auto& ex = out.entries[x];
    const auto& ey = out.entries[y];
    if (ex.p != ey.p) return ex.p < ey.p;
    return ex.name < ey.name;
  });
  for (size_t r = 0; r < order.size(); ++r) out.entries[order[r]].rank = static_cast<int>(r + 1);
  return out;
}

RankDeltaTable RankDeltas(const RankTable& baseline, const RankTable& altered) {
  std::set<std::string> a, b;
  for (const auto& e : baseline.entries) a.insert(e.name);
  for (const auto& e : altered.entries) b.insert(e.name);
  if (a != b) throw Error(ErrorKind::kMismatch, "rank tables cover different features");
  RankDeltaTable out;
  out.level = altered.level;
  for (const auto& base : baseline.entries) {
    const auto& alt = altered.Get(base.name);
    RankDelta d;
    d.name = base.name;
    d.group = base.group;
    d.base_rank = base.rank;
    d.altered_rank = alt.rank;
    d.delta = base.rank - alt.rank;
    d.base_significant = base.significant;
    d.altered_significant = alt.significant;
    out.deltas.push_back(d);
  }
  for (FeatureGroup g : {FeatureGroup::kLexical, FeatureGroup::kSyntactic}) {
    GroupRankSummary s;
    s.group = g;
    bool any = false;
    int sig = 0, lost = 0;
    for (const auto& d : out.deltas) {
      if (d.group != g) continue;
      s.max_increase = any ? std::max(s.max_increase, d.delta) : d.delta;
      any = true;
      if (d.base_significant) {
        ++sig;
        if (!d.altered_significant) ++lost;
      }
    }
    if (!any) continue;
    if (sig > 0) s.became_insignificant = static_cast<double>(lost) / sig;
    out.summary.push_back(s);
  }
  return out;
}

std::string HeatmapColor(const RankDelta& cell, int max_abs_delta) {
  if (!cell.base_significant) return "white";
  const int mag = std::abs(cell.delta);
  if (max_abs_delta > 0 && 2 * mag >= max_abs_delta) {
    if (cell.delta > 0) return "blue";
    if (cell.delta < 0) return "red";
  }
  return "yellow";
}

}  // namespace lexsyn::stats
