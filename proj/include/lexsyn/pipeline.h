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

// Experiment orchestration: configuration, the six on-disk stages, the
// content-hash manifest, the report bundle and its plots.
//
// Output directory layout:
//   manifest.json                 artifact hashes and their inputs
//   corpus.jsonl                  ingest
//   levels/corpus_L{x}.jsonl      perturb
//   features/features_L{x}.csv    extract (x = 0 and every plan level)
//   cv_results.json               evaluate
//   analysis.json, profile.csv, zscores.csv, cv.csv, f1_delta.csv,
//   importance.csv, rank_changes.csv, zscores/z_L{x}.csv
//                                 analyze
//   bundle.json, plots/*.svg      report

#ifndef LEXSYN_PIPELINE_H_
#define LEXSYN_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lexsyn/corpus.h"
#include "lexsyn/lexfeat.h"
#include "lexsyn/models.h"
#include "lexsyn/perturb.h"
#include "lexsyn/stats.h"

namespace lexsyn::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineConfig {
  std::filesystem::path corpus;
  CorpusFormat corpus_format = CorpusFormat::kJsonl;
  std::string corpus_name;  // defaults to the corpus file stem
  uint64_t seed = 0;        // master seed
  perturb::PerturbationPlan plan;
  std::filesystem::path wordlist;
  lexfeat::LexicalConfig lexical;
  std::vector<models::ModelKind> models{models::ModelKind::kGnb, models::ModelKind::kRf,
                                        models::ModelKind::kSvm, models::ModelKind::kMlp};
  int folds = 10;
  double significance = 0.05;
  stats::Aggregation aggregation = stats::Aggregation::kShift;
  stats::AggregationOrder aggregation_order = stats::AggregationOrder::kFeatureThenDocument;
  std::optional<double> svm_gamma;  // unset: 1 / (d * variance)
  int mlp_batch = 0;                // 0: full batch
  std::filesystem::path patterns;       // optional production-unit file
  std::filesystem::path dlevel_rules;   // optional D-level rule file
  std::filesystem::path reference_values;  // optional published values
  std::filesystem::path out = "out";
  int jobs = 1;

  // Parses `key = value` lines; '#' starts a comment. Relative paths are
  // resolved against `base_dir`. LEXSYN_WORDLIST, when set, replaces the
  // wordlist. Throws Error(kConfig) on unknown or duplicate keys and
  // malformed values.
  static PipelineConfig Parse(std::string_view text, const std::filesystem::path& base_dir);
  static PipelineConfig Load(const std::filesystem::path& file);

  // Stochastic components draw from seeds derived here.
  void SetSeed(uint64_t master);

  // Checks ranges and that every referenced file exists. Throws
  // Error(kConfig).
  void Validate() const;

  // Canonical form for the manifest and bundle: output directory and jobs
  // are left out and paths are reduced to file names.
  nlohmann::ordered_json ToJson() const;

  models::ModelSpec Spec(models::ModelKind kind) const;
  uint64_t FoldSeed() const;
};

enum class Stage { kIngest, kPerturb, kExtract, kEvaluate, kAnalyze, kReport };

const char* StageName(Stage stage);
Stage ParseStage(std::string_view name);

// Runs one stage against config.out. Inputs are checked against the
// manifest: a missing input or one whose hash (or whose own inputs' hashes)
// no longer match throws Error(kStale). Any other failure is rethrown with
// the stage name prefixed; artifacts written by earlier stages are kept.
void RunStage(Stage stage, const PipelineConfig& config);

// Validates the config, then runs every stage in order and returns the
// report bundle (also written to out/bundle.json).
nlohmann::ordered_json RunPipeline(const PipelineConfig& config);

// Tables a complete bundle carries.
const std::vector<std::string>& BundleTableNames();

// Writes zscores.svg (Z per group against level, level 0 included),
// importance.svg (coefficient bars per model) and rank_heatmap.svg. Throws
// Error(kSchema) listing the missing tables when the bundle is incomplete.
// Returns the written paths.
std::vector<std::filesystem::path> EmitPlots(const nlohmann::ordered_json& bundle,
                                             const std::filesystem::path& dir);

// Lower-case hex SHA-256 of a file's bytes. Throws Error(kIo).
std::string FileSha256(const std::filesystem::path& path);

}  // namespace lexsyn::pipeline

#endif  // LEXSYN_PIPELINE_H_
