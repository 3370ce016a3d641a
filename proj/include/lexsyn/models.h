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

// Binary classifiers (Gaussian naive Bayes, random forest, RBF SVM, MLP),
// SMOTE oversampling, macro F1 and subject-grouped cross-validation.
//
// Labels are 0/1 throughout; callers map class names to indices.

#ifndef LEXSYN_MODELS_H_
#define LEXSYN_MODELS_H_

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lexsyn/corpus.h"
#include "lexsyn/features.h"

namespace lexsyn::models {

// Dense row-major matrix.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  static Matrix FromRows(const std::vector<std::vector<double>>& rows);

  double& operator()(size_t r, size_t c) { return data[r * cols + c]; }
  double operator()(size_t r, size_t c) const { return data[r * cols + c]; }
  const double* Row(size_t r) const { return data.data() + r * cols; }
  void AppendRow(const double* values);
  Matrix SelectRows(const std::vector<size_t>& idx) const;
};

enum class ModelKind { kGnb, kRf, kSvm, kMlp };

ModelKind ParseModelKind(std::string_view name);
const char* ModelKindName(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::kGnb;
  uint64_t seed = 0;

  // gnb: equal class priors; variances smoothed by var_smoothing * max var.
  double gnb_var_smoothing = 1e-9;
  // rf
  int rf_trees = 100;
  int rf_max_depth = 5;
  // svm: gamma unset means 1 / (d * variance of the standardized matrix).
  double svm_c = 1.0;
  double svm_tol = 1e-3;
  std::optional<double> svm_gamma;
  int svm_max_iter = 1000000;
  // mlp: batch 0 means full batch.
  std::vector<int> mlp_hidden{10, 10};
  int mlp_epochs = 200;
  int mlp_batch = 0;
  double mlp_learning_rate = 0.001;
  double mlp_beta1 = 0.9;
  double mlp_beta2 = 0.999;
  double mlp_epsilon = 1e-8;
  double mlp_alpha = 1e-4;

  static ModelSpec Defaults(ModelKind kind, uint64_t seed);
  nlohmann::ordered_json ToJson() const;
  static ModelSpec FromJson(const nlohmann::ordered_json& j);
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::vector<int> Predict(const Matrix& x) const = 0;
  virtual nlohmann::ordered_json Describe() const = 0;
};

// A trained model: column selection and scaling followed by a classifier.
class Model {
 public:
  // Throws Error(kDimension) when x has a different column count than the
  // training matrix.
  std::vector<int> Predict(const Matrix& x) const;

  const ModelSpec& spec() const { return spec_; }
  size_t input_columns() const { return input_columns_; }
  const std::vector<size_t>& dropped_columns() const { return dropped_; }
  const Classifier& classifier() const { return *classifier_; }
  nlohmann::ordered_json Metadata() const;

 private:
  friend Model Train(const ModelSpec& spec, const Matrix& x, const std::vector<int>& y);

  ModelSpec spec_;
  size_t input_columns_ = 0;
  std::vector<size_t> kept_;
  std::vector<size_t> dropped_;
  std::vector<double> mean_;   // empty when features are not standardized
  std::vector<double> scale_;
  std::shared_ptr<const Classifier> classifier_;
};

// Fits a model. Zero-variance columns are dropped with a warning and listed
// in the model metadata; svm and mlp see train-standardized features.
// Throws Error(kDegenerate) when a class is missing and Error(kDimension)
// when x and y disagree in length.
Model Train(const ModelSpec& spec, const Matrix& x, const std::vector<int>& y);

// Random forest tree depths, for inspection; empty for other kinds.
std::vector<int> ForestDepths(const Model& model);

// Balances the classes by interpolating between minority rows and one of
// their k nearest minority neighbours, k = min(k_max, minority - 1).
// Synthetic rows follow the originals. A minority of one row falls back to
// duplication with a warning; a single class throws Error(kDegenerate).
std::pair<Matrix, std::vector<int>> SmoteOversample(const Matrix& x, const std::vector<int>& y,
                                                    int k_max, uint64_t seed);

// Unweighted mean of per-class F1 over `labels`. A listed class absent from
// both vectors contributes 0. Throws Error(kDimension) on length mismatch or
// empty input.
double MacroF1(const std::vector<int>& y_true, const std::vector<int>& y_pred,
               const std::vector<int>& labels = {0, 1});

struct FoldOutcome {
  int fold = 0;
  bool skipped = false;
  std::string reason;  // set when skipped
  double f1 = 0.0;
  size_t train_size = 0;
  size_t test_size = 0;
  size_t synthetic = 0;
  std::vector<std::string> dropped_features;
};

struct CVResult {
  ModelSpec spec;
  int alteration_level = 0;
  std::vector<FoldOutcome> folds;
  double mean_f1 = 0.0;  // mean over folds that were not skipped

  std::vector<double> FoldF1() const;
  nlohmann::ordered_json ToJson() const;
  static CVResult FromJson(const nlohmann::ordered_json& j);
};

// Subject-grouped folds for a feature table (see GroupFolds).
FoldAssignment GroupFoldsForTable(const FeatureTable& table, int k, uint64_t seed);

// Per fold: absent values imputed with train-fold column means, SMOTE on the
// training rows only, then Train and macro F1 on the held-out rows. Folds
// whose training rows hold a single class are skipped with a warning.
// Labels are indices into the table's sorted label set.
CVResult CrossValidate(const FeatureTable& table, const FoldAssignment& folds,
                       const ModelSpec& spec, int jobs = 1);

}  // namespace lexsyn::models

#endif  // LEXSYN_MODELS_H_
