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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace lexsyn::models {

using nlohmann::ordered_json;

// --- matrix -------------------------------------------------------------------

Matrix Matrix::FromRows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows[0].size();
  m.data.reserve(m.rows * m.cols);
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw Error(ErrorKind::kDimension, "ragged matrix rows");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

void Matrix::AppendRow(const double* values) {
  data.insert(data.end(), values, values + cols);
  ++rows;
}

Matrix Matrix::SelectRows(const std::vector<size_t>& idx) const {
  Matrix out(0, cols);
  out.data.reserve(idx.size() * cols);
  for (size_t i : idx) out.AppendRow(Row(i));
  return out;
}

// --- spec -------------------------------------------------------------------

ModelKind ParseModelKind(std::string_view name) {
  if (name == "gnb") return ModelKind::kGnb;
  if (name == "rf") return ModelKind::kRf;
  if (name == "svm") return ModelKind::kSvm;
  if (name == "mlp") return ModelKind::kMlp;
  throw Error(ErrorKind::kConfig,
              "unknown model '" + std::string(name) + "' (expected gnb, rf, svm or mlp)");
}

const char* ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kGnb: return "gnb";
    case ModelKind::kRf: return "rf";
    case ModelKind::kSvm: return "svm";
    case ModelKind::kMlp: return "mlp";
  }
  return "?";
}

ModelSpec ModelSpec::Defaults(ModelKind kind, uint64_t seed) {
  ModelSpec s;
  s.kind = kind;
  s.seed = seed;
  return s;
}

ordered_json ModelSpec::ToJson() const {
  ordered_json j;
  j["kind"] = ModelKindName(kind);
  j["seed"] = seed;
  ordered_json h = ordered_json::object();
  switch (kind) {
    case ModelKind::kGnb:
      h["priors"] = "equal";
      h["var_smoothing"] = gnb_var_smoothing;
      break;
    case ModelKind::kRf:
      h["trees"] = rf_trees;
      h["max_depth"] = rf_max_depth;
      h["max_features"] = "sqrt";
      h["criterion"] = "gini";
      h["bootstrap"] = true;
      break;
    case ModelKind::kSvm:
      h["kernel"] = "rbf";
      h["C"] = svm_c;
      h["tol"] = svm_tol;
      if (svm_gamma) {
        h["gamma"] = *svm_gamma;
      } else {
        h["gamma"] = "1/(d*var)";
      }
      h["max_iter"] = svm_max_iter;
      break;
    case ModelKind::kMlp:
      h["hidden"] = mlp_hidden;
      h["activation"] = "relu";
      h["epochs"] = mlp_epochs;
      h["batch"] = mlp_batch == 0 ? ordered_json("full") : ordered_json(mlp_batch);
      h["optimizer"] = "adam";
      h["learning_rate"] = mlp_learning_rate;
      h["beta1"] = mlp_beta1;
      h["beta2"] = mlp_beta2;
      h["epsilon"] = mlp_epsilon;
      h["alpha"] = mlp_alpha;
      break;
  }
  j["hyperparameters"] = h;
  return j;
}

ModelSpec ModelSpec::FromJson(const ordered_json& j) {
  ModelSpec s = Defaults(ParseModelKind(j.at("kind").get<std::string>()),
                         j.at("seed").get<uint64_t>());
  const auto& h = j.at("hyperparameters");
  switch (s.kind) {
    case ModelKind::kGnb:
      s.gnb_var_smoothing = h.at("var_smoothing").get<double>();
      break;
    case ModelKind::kRf:
      s.rf_trees = h.at("trees").get<int>();
      s.rf_max_depth = h.at("max_depth").get<int>();
      break;
    case ModelKind::kSvm:
      s.svm_c = h.at("C").get<double>();
      s.svm_tol = h.at("tol").get<double>();
      if (h.at("gamma").is_number()) s.svm_gamma = h.at("gamma").get<double>();
      s.svm_max_iter = h.at("max_iter").get<int>();
      break;
    case ModelKind::kMlp:
      s.mlp_hidden = h.at("hidden").get<std::vector<int>>();
      s.mlp_epochs = h.at("epochs").get<int>();
      s.mlp_batch = h.at("batch").is_number() ? h.at("batch").get<int>() : 0;
      s.mlp_learning_rate = h.at("learning_rate").get<double>();
      s.mlp_beta1 = h.at("beta1").get<double>();
      s.mlp_beta2 = h.at("beta2").get<double>();
      s.mlp_epsilon = h.at("epsilon").get<double>();
      s.mlp_alpha = h.at("alpha").get<double>();
      break;
  }
  return s;
}

// --- classifiers ----------------------------------------------------------------

namespace {

class ConstantClassifier : public Classifier {
 public:
  explicit ConstantClassifier(int label) : label_(label) {}
  std::vector<int> Predict(const Matrix& x) const override {
    return std::vector<int>(x.rows, label_);
  }
  ordered_json Describe() const override { return {{"constant", label_}}; }

 private:
  int label_;
};

class GaussianNb : public Classifier {
 public:
  GaussianNb(const Matrix& x, const std::vector<int>& y, double smoothing) {
    const size_t d = x.cols;
    double max_var = 0.0;
    for (size_t c = 0; c < d; ++c) {
      double m = 0.0;
      for (size_t r = 0; r < x.rows; ++r) m += x(r, c);
      m /= x.rows;
      double v = 0.0;
      for (size_t r = 0; r < x.rows; ++r) v += (x(r, c) - m) * (x(r, c) - m);
      max_var = std::max(max_var, v / x.rows);
    }
    epsilon_ = smoothing * max_var;
    for (int k = 0; k < 2; ++k) {
      mean_[k].assign(d, 0.0);
      var_[k].assign(d, 0.0);
      size_t n = 0;
      for (size_t r = 0; r < x.rows; ++r) {
        if (y[r] != k) continue;
        ++n;
        for (size_t c = 0; c < d; ++c) mean_[k][c] += x(r, c);
      }
      for (auto& m : mean_[k]) m /= n;
      for (size_t r = 0; r < x.rows; ++r) {
        if (y[r] != k) continue;
        for (size_t c = 0; c < d; ++c) {
          const double e = x(r, c) - mean_[k][c];
          var_[k][c] += e * e;
        }
      }
      for (auto& v : var_[k]) v = v / n + epsilon_;
    }
  }

  std::vector<int> Predict(const Matrix& x) const override {
    std::vector<int> out(x.rows);
    for (size_t r = 0; r < x.rows; ++r) {
      double ll[2];
      // Equal priors: the prior term is the same for both classes.
      for (int k = 0; k < 2; ++k) {
        double s = 0.0;
        for (size_t c = 0; c < x.cols; ++c) {
          const double e = x(r, c) - mean_[k][c];
          s -= 0.5 * std::log(2.0 * M_PI * var_[k][c]) + 0.5 * e * e / var_[k][c];
        }
        ll[k] = s;
      }
      out[r] = ll[1] > ll[0] ? 1 : 0;
    }
    return out;
  }

  ordered_json Describe() const override { return {{"epsilon", epsilon_}}; }

 private:
  std::vector<double> mean_[2];
  std::vector<double> var_[2];
  double epsilon_ = 0.0;
};

// CART tree with Gini impurity, grown on a bootstrap sample.
class DecisionTree {
 public:
  DecisionTree(const Matrix& x, const std::vector<int>& y, std::vector<size_t> sample,
               int max_depth, int max_features, Rng* rng) {
    Builder b{x, y, max_depth, max_features, rng, this};
    b.Grow(std::move(sample), 0);
  }

  int Predict(const double* row) const {
    int n = 0;
    while (nodes_[n].feature >= 0) {
      n = row[nodes_[n].feature] <= nodes_[n].threshold ? nodes_[n].left : nodes_[n].right;
    }
    return nodes_[n].label;
  }

  int depth() const { return depth_; }

 private:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
  };

  static double Gini(double n0, double n1) {
    const double n = n0 + n1;
    if (n == 0) return 0.0;
    const double p0 = n0 / n, p1 = n1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
  }

  struct Builder {
    const Matrix& x;
    const std::vector<int>& y;
    int max_depth;
    int max_features;
    Rng* rng;
    DecisionTree* tree;

    int Grow(std::vector<size_t> sample, int depth) {
      const int id = static_cast<int>(tree->nodes_.size());
      tree->nodes_.emplace_back();
      tree->depth_ = std::max(tree->depth_, depth);
      double n1 = 0;
      for (size_t i : sample) n1 += y[i];
      const double n0 = static_cast<double>(sample.size()) - n1;
      tree->nodes_[id].label = n1 > n0 ? 1 : 0;
      if (depth >= max_depth || n0 == 0 || n1 == 0 || sample.size() < 2) return id;

      std::vector<size_t> features(x.cols);
      std::iota(features.begin(), features.end(), 0);
      for (int i = 0; i < max_features; ++i) {
        const size_t j = i + static_cast<size_t>(rng->UniformIndex(features.size() - i));
        std::swap(features[i], features[j]);
      }
      const double parent = Gini(n0, n1) * sample.size();
      double best = parent;
      int best_feature = -1;
      double best_threshold = 0.0;
      std::vector<std::pair<double, int>> vals(sample.size());
      for (int fi = 0; fi < max_features; ++fi) {
        const size_t f = features[fi];
        for (size_t k = 0; k < sample.size(); ++k) vals[k] = {x(sample[k], f), y[sample[k]]};
        std::sort(vals.begin(), vals.end());
        double l0 = 0, l1 = 0;
        for (size_t k = 0; k + 1 < vals.size(); ++k) {
          (vals[k].second ? l1 : l0) += 1;
          if (vals[k].first == vals[k + 1].first) continue;
          const double r0 = n0 - l0, r1 = n1 - l1;
          const double impurity = Gini(l0, l1) * (l0 + l1) + Gini(r0, r1) * (r0 + r1);
          if (impurity < best - 1e-12) {
            best = impurity;
            best_feature = static_cast<int>(f);
            best_threshold = 0.5 * (vals[k].first + vals[k + 1].first);
            // Midpoint can round onto the upper value for adjacent doubles.
            if (best_threshold >= vals[k + 1].first) best_threshold = vals[k].first;
          }
        }
      }
      if (best_feature < 0) return id;
      std::vector<size_t> left, right;
      for (size_t i : sample) {
        (x(i, best_feature) <= best_threshold ? left : right).push_back(i);
      }
      sample.clear();
      sample.shrink_to_fit();
      const int l = Grow(std::move(left), depth + 1);
      const int r = Grow(std::move(right), depth + 1);
      tree->nodes_[id].feature = best_feature;
      tree->nodes_[id].threshold = best_threshold;
      tree->nodes_[id].left = l;
      tree->nodes_[id].right = r;
      return id;
    }
  };

  std::vector<Node> nodes_;
  int depth_ = 0;
};

class RandomForest : public Classifier {
 public:
  RandomForest(const Matrix& x, const std::vector<int>& y, const ModelSpec& spec) {
    Rng rng(spec.seed);
    const int max_features =
        std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols)))));
    trees_.reserve(spec.rf_trees);
    for (int t = 0; t < spec.rf_trees; ++t) {
      std::vector<size_t> sample(x.rows);
      for (auto& s : sample) s = static_cast<size_t>(rng.UniformIndex(x.rows));
      trees_.emplace_back(x, y, std::move(sample), spec.rf_max_depth, max_features, &rng);
    }
  }

  std::vector<int> Predict(const Matrix& x) const override {
    std::vector<int> out(x.rows);
    for (size_t r = 0; r < x.rows; ++r) {
      int votes = 0;
      for (const auto& t : trees_) votes += t.Predict(x.Row(r));
      out[r] = 2 * votes > static_cast<int>(trees_.size()) ? 1 : 0;
    }
    return out;
  }

  std::vector<int> Depths() const {
    std::vector<int> d;
    for (const auto& t : trees_) d.push_back(t.depth());
    return d;
  }

  ordered_json Describe() const override {
    const auto d = Depths();
    return {{"trees", trees_.size()},
            {"max_observed_depth", d.empty() ? 0 : *std::max_element(d.begin(), d.end())}};
  }

 private:
  std::vector<DecisionTree> trees_;
};

double RbfKernel(const double* a, const double* b, size_t d, double gamma) {
  double s = 0.0;
  for (size_t k = 0; k < d; ++k) {
    const double e = a[k] - b[k];
    s += e * e;
  }
  return std::exp(-gamma * s);
}

// C-SVC dual solved by SMO with second-order working-set selection.
class RbfSvm : public Classifier {
 public:
  RbfSvm(const Matrix& x, const std::vector<int>& labels, const ModelSpec& spec) {
    const size_t n = x.rows, d = x.cols;
    if (spec.svm_gamma) {
      gamma_ = *spec.svm_gamma;
    } else {
      double mean = 0.0;
      for (double v : x.data) mean += v;
      mean /= x.data.size();
      double var = 0.0;
      for (double v : x.data) var += (v - mean) * (v - mean);
      var /= x.data.size();
      gamma_ = var > 0 ? 1.0 / (d * var) : 1.0;
    }
    const double C = spec.svm_c;
    std::vector<double> y(n), alpha(n, 0.0), grad(n, -1.0), qd(n, 1.0);
    for (size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;
    std::vector<std::vector<double>> cache(n);
    auto row = [&](size_t i) -> const std::vector<double>& {
      if (cache[i].empty()) {
        cache[i].resize(n);
        for (size_t t = 0; t < n; ++t) cache[i][t] = RbfKernel(x.Row(i), x.Row(t), d, gamma_);
      }
      return cache[i];
    };
    auto up = [&](size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
    auto low = [&](size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };
    constexpr double kTau = 1e-12;

    int iter = 0;
    for (; iter < spec.svm_max_iter; ++iter) {
      double gmax = -std::numeric_limits<double>::infinity();
      long i = -1;
      for (size_t t = 0; t < n; ++t) {
        if (up(t) && -y[t] * grad[t] >= gmax) {
          gmax = -y[t] * grad[t];
          i = static_cast<long>(t);
        }
      }
      if (i < 0) break;
      const auto& ki = row(i);
      double gmax2 = -std::numeric_limits<double>::infinity();
      double obj_min = std::numeric_limits<double>::infinity();
      long j = -1;
      for (size_t t = 0; t < n; ++t) {
        if (!low(t)) continue;
        const double yg = y[t] * grad[t];
        gmax2 = std::max(gmax2, yg);
        const double diff = gmax + yg;
        if (diff > 0) {
          double quad = qd[i] + qd[t] - 2.0 * ki[t];
          if (quad <= 0) quad = kTau;
          const double obj = -diff * diff / quad;
          if (obj <= obj_min) {
            obj_min = obj;
            j = static_cast<long>(t);
          }
        }
      }
      if (gmax + gmax2 < spec.svm_tol || j < 0) break;
      const auto& kj = row(j);
      const double old_i = alpha[i], old_j = alpha[j];
      double quad = qd[i] + qd[j] - 2.0 * ki[j];
      if (quad <= 0) quad = kTau;
      if (y[i] != y[j]) {
        const double delta = (-grad[i] - grad[j]) / quad;
        const double diff = alpha[i] - alpha[j];
        alpha[i] += delta;
        alpha[j] += delta;
        if (diff > 0) {
          if (alpha[j] < 0) {
            alpha[j] = 0;
            alpha[i] = diff;
          }
        } else if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = -diff;
        }
        if (diff > 0) {
          if (alpha[i] > C) {
            alpha[i] = C;
            alpha[j] = C - diff;
          }
        } else if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = C + diff;
        }
      } else {
        const double delta = (grad[i] - grad[j]) / quad;
        const double sum = alpha[i] + alpha[j];
        alpha[i] -= delta;
        alpha[j] += delta;
        if (sum > C) {
          if (alpha[i] > C) {
            alpha[i] = C;
            alpha[j] = sum - C;
          }
        } else if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = sum;
        }
        if (sum > C) {
          if (alpha[j] > C) {
            alpha[j] = C;
            alpha[i] = sum - C;
          }
        } else if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = sum;
        }
      }
      const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
      for (size_t t = 0; t < n; ++t) {
        grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
      }
    }
    iterations_ = iter;
    if (iter >= spec.svm_max_iter) Warn("svm: iteration limit reached before tolerance");

    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (size_t t = 0; t < n; ++t) {
      const double yg = y[t] * grad[t];
      if (alpha[t] >= C) {
        if (y[t] < 0) {
          ub = std::min(ub, yg);
        } else {
          lb = std::max(lb, yg);
        }
      } else if (alpha[t] <= 0) {
        if (y[t] > 0) {
          ub = std::min(ub, yg);
        } else {
          lb = std::max(lb, yg);
        }
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    rho_ = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
    support_ = Matrix(0, d);
    for (size_t t = 0; t < n; ++t) {
      if (alpha[t] > 0) {
        support_.AppendRow(x.Row(t));
        coef_.push_back(alpha[t] * y[t]);
      }
    }
  }

  std::vector<int> Predict(const Matrix& x) const override {
    std::vector<int> out(x.rows);
    for (size_t r = 0; r < x.rows; ++r) {
      double f = -rho_;
      for (size_t s = 0; s < support_.rows; ++s) {
        f += coef_[s] * RbfKernel(support_.Row(s), x.Row(r), x.cols, gamma_);
      }
      out[r] = f > 0 ? 1 : 0;
    }
    return out;
  }

  ordered_json Describe() const override {
    return {{"gamma", gamma_}, {"support_vectors", support_.rows},
            {"iterations", iterations_}, {"rho", rho_}};
  }

 private:
  double gamma_ = 1.0;
  double rho_ = 0.0;
  int iterations_ = 0;
  Matrix support_;
  std::vector<double> coef_;
};

// Feed-forward ReLU network with a sigmoid output trained on log loss.
class Mlp : public Classifier {
 public:
  Mlp(const Matrix& x, const std::vector<int>& y, const ModelSpec& spec) {
    Rng rng(spec.seed);
    std::vector<int> sizes{static_cast<int>(x.cols)};
    sizes.insert(sizes.end(), spec.mlp_hidden.begin(), spec.mlp_hidden.end());
    sizes.push_back(1);
    const size_t layers = sizes.size() - 1;
    w_.resize(layers);
    b_.resize(layers);
    in_.resize(layers);
    out_.resize(layers);
    for (size_t l = 0; l < layers; ++l) {
      in_[l] = sizes[l];
      out_[l] = sizes[l + 1];
      const double factor = l + 1 == layers ? 2.0 : 6.0;
      const double bound = std::sqrt(factor / (in_[l] + out_[l]));
      w_[l].resize(static_cast<size_t>(in_[l]) * out_[l]);
      b_[l].resize(out_[l]);
      for (auto& v : w_[l]) v = (2.0 * rng.Uniform01() - 1.0) * bound;
      for (auto& v : b_[l]) v = (2.0 * rng.Uniform01() - 1.0) * bound;
    }
    Fit(x, y, spec, &rng);
  }

  std::vector<int> Predict(const Matrix& x) const override {
    std::vector<int> out(x.rows);
    std::vector<std::vector<double>> acts;
    for (size_t r = 0; r < x.rows; ++r) {
      Forward(x.Row(r), &acts);
      out[r] = acts.back()[0] > 0.5 ? 1 : 0;
    }
    return out;
  }

  ordered_json Describe() const override { return {{"final_loss", final_loss_}}; }

 private:
  // acts[0] is the input; acts[l + 1] the output of layer l.
  void Forward(const double* row, std::vector<std::vector<double>>* acts) const {
    const size_t layers = w_.size();
    acts->resize(layers + 1);
    (*acts)[0].assign(row, row + in_[0]);
    for (size_t l = 0; l < layers; ++l) {
      auto& a = (*acts)[l + 1];
      a.assign(out_[l], 0.0);
      const auto& prev = (*acts)[l];
      for (int o = 0; o < out_[l]; ++o) {
        double s = b_[l][o];
        for (int i = 0; i < in_[l]; ++i) s += prev[i] * w_[l][static_cast<size_t>(i) * out_[l] + o];
        if (l + 1 == layers) {
          a[o] = 1.0 / (1.0 + std::exp(-s));
        } else {
          a[o] = s > 0 ? s : 0.0;
        }
      }
    }
  }

  void Fit(const Matrix& x, const std::vector<int>& y, const ModelSpec& spec, Rng* rng) {
    const size_t n = x.rows, layers = w_.size();
    const size_t batch = spec.mlp_batch > 0 ? std::min<size_t>(spec.mlp_batch, n) : n;
    std::vector<std::vector<double>> mw(layers), vw(layers), mb(layers), vb(layers);
    std::vector<std::vector<double>> gw(layers), gb(layers);
    for (size_t l = 0; l < layers; ++l) {
      mw[l].assign(w_[l].size(), 0.0);
      vw[l] = gw[l] = mw[l];
      mb[l].assign(b_[l].size(), 0.0);
      vb[l] = gb[l] = mb[l];
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> delta(layers);
    long step = 0;
    for (int epoch = 0; epoch < spec.mlp_epochs; ++epoch) {
      if (batch < n) rng->Shuffle(order);
      double epoch_loss = 0.0;
      for (size_t start = 0; start < n; start += batch) {
        const size_t end = std::min(n, start + batch);
        const double m = static_cast<double>(end - start);
        for (size_t l = 0; l < layers; ++l) {
          std::fill(gw[l].begin(), gw[l].end(), 0.0);
          std::fill(gb[l].begin(), gb[l].end(), 0.0);
        }
        for (size_t k = start; k < end; ++k) {
          const size_t r = order[k];
          Forward(x.Row(r), &acts);
          const double p = std::clamp(acts.back()[0], 1e-15, 1.0 - 1e-15);
          epoch_loss -= y[r] ? std::log(p) : std::log(1.0 - p);
          delta[layers - 1].assign(1, (acts.back()[0] - y[r]) / m);
          for (size_t l = layers; l-- > 0;) {
            const auto& prev = acts[l];
            for (int o = 0; o < out_[l]; ++o) {
              const double dl = delta[l][o];
              gb[l][o] += dl;
              for (int i = 0; i < in_[l]; ++i) {
                gw[l][static_cast<size_t>(i) * out_[l] + o] += prev[i] * dl;
              }
            }
            if (l == 0) break;
            delta[l - 1].assign(in_[l], 0.0);
            for (int i = 0; i < in_[l]; ++i) {
              if (prev[i] <= 0) continue;  // ReLU derivative
              double s = 0.0;
              for (int o = 0; o < out_[l]; ++o) {
                s += w_[l][static_cast<size_t>(i) * out_[l] + o] * delta[l][o];
              }
              delta[l - 1][i] = s;
            }
          }
        }
        ++step;
        const double corr = std::sqrt(1.0 - std::pow(spec.mlp_beta2, step)) /
                            (1.0 - std::pow(spec.mlp_beta1, step));
        const double lr = spec.mlp_learning_rate * corr;
        auto adam = [&](std::vector<double>& p, std::vector<double>& g, std::vector<double>& mm,
                        std::vector<double>& vv) {
          for (size_t q = 0; q < p.size(); ++q) {
            mm[q] = spec.mlp_beta1 * mm[q] + (1 - spec.mlp_beta1) * g[q];
            vv[q] = spec.mlp_beta2 * vv[q] + (1 - spec.mlp_beta2) * g[q] * g[q];
            p[q] -= lr * mm[q] / (std::sqrt(vv[q]) + spec.mlp_epsilon);
          }
        };
        for (size_t l = 0; l < layers; ++l) {
          for (size_t q = 0; q < w_[l].size(); ++q) gw[l][q] += spec.mlp_alpha * w_[l][q] / m;
          adam(w_[l], gw[l], mw[l], vw[l]);
          adam(b_[l], gb[l], mb[l], vb[l]);
        }
      }
      final_loss_ = epoch_loss / n;
    }
  }

  std::vector<std::vector<double>> w_;  // w_[l][i * out + o]
  std::vector<std::vector<double>> b_;
  std::vector<int> in_;
  std::vector<int> out_;
  double final_loss_ = 0.0;
};

}  // namespace

// --- model --------------------------------------------------------------------

std::vector<int> Model::Predict(const Matrix& x) const {
  if (x.cols != input_columns_) {
    throw Error(ErrorKind::kDimension, "model expects " + std::to_string(input_columns_) +
                                           " columns, got " + std::to_string(x.cols));
  }
  if (x.rows == 0) return {};
  Matrix z(x.rows, kept_.size());
  for (size_t r = 0; r < x.rows; ++r) {
    for (size_t c = 0; c < kept_.size(); ++c) {
      double v = x(r, kept_[c]);
      if (!mean_.empty()) v = (v - mean_[c]) / scale_[c];
      z(r, c) = v;
    }
  }
  return classifier_->Predict(z);
}

ordered_json Model::Metadata() const {
  ordered_json j;
  j["spec"] = spec_.ToJson();
  j["input_columns"] = input_columns_;
  j["dropped_columns"] = dropped_;
  j["standardized"] = !mean_.empty();
  j["classifier"] = classifier_->Describe();
  return j;
}

Model Train(const ModelSpec& spec, const Matrix& x, const std::vector<int>& y) {
  if (x.rows != y.size()) {
    throw Error(ErrorKind::kDimension, std::to_string(x.rows) + " rows but " +
                                           std::to_string(y.size()) + " labels");
  }
  size_t count[2] = {0, 0};
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorKind::kSchema, "labels must be 0 or 1");
    ++count[v];
  }
  if (count[0] == 0 || count[1] == 0) {
    throw Error(ErrorKind::kDegenerate, "training data holds a single class");
  }
  Model m;
  m.spec_ = spec;
  m.input_columns_ = x.cols;
  for (size_t c = 0; c < x.cols; ++c) {
    bool constant = true;
    for (size_t r = 1; r < x.rows && constant; ++r) constant = x(r, c) == x(0, c);
    if (constant) {
      m.dropped_.push_back(c);
    } else {
      m.kept_.push_back(c);
    }
  }
  if (!m.dropped_.empty()) {
    Warn(std::string(ModelKindName(spec.kind)) + ": dropped " +
         std::to_string(m.dropped_.size()) + " zero-variance column(s)");
  }
  Matrix z(x.rows, m.kept_.size());
  for (size_t r = 0; r < x.rows; ++r) {
    for (size_t c = 0; c < m.kept_.size(); ++c) z(r, c) = x(r, m.kept_[c]);
  }
  if (spec.kind == ModelKind::kSvm || spec.kind == ModelKind::kMlp) {
    m.mean_.assign(z.cols, 0.0);
    m.scale_.assign(z.cols, 0.0);
    for (size_t c = 0; c < z.cols; ++c) {
      double mu = 0.0;
      for (size_t r = 0; r < z.rows; ++r) mu += z(r, c);
      mu /= z.rows;
      double var = 0.0;
      for (size_t r = 0; r < z.rows; ++r) var += (z(r, c) - mu) * (z(r, c) - mu);
      const double sd = std::sqrt(var / z.rows);
      m.mean_[c] = mu;
      m.scale_[c] = sd > 0 ? sd : 1.0;
      for (size_t r = 0; r < z.rows; ++r) z(r, c) = (z(r, c) - mu) / m.scale_[c];
    }
  }
  if (z.cols == 0) {
    m.classifier_ = std::make_shared<ConstantClassifier>(count[1] > count[0] ? 1 : 0);
    return m;
  }
  switch (spec.kind) {
    case ModelKind::kGnb:
      m.classifier_ = std::make_shared<GaussianNb>(z, y, spec.gnb_var_smoothing);
      break;
    case ModelKind::kRf:
      m.classifier_ = std::make_shared<RandomForest>(z, y, spec);
      break;
    case ModelKind::kSvm:
      m.classifier_ = std::make_shared<RbfSvm>(z, y, spec);
      break;
    case ModelKind::kMlp:
      m.classifier_ = std::make_shared<Mlp>(z, y, spec);
      break;
  }
  return m;
}

std::vector<int> ForestDepths(const Model& model) {
  if (const auto* rf = dynamic_cast<const RandomForest*>(&model.classifier())) return rf->Depths();
  return {};
}

// --- SMOTE ---------------------------------------------------------------------

std::pair<Matrix, std::vector<int>> SmoteOversample(const Matrix& x, const std::vector<int>& y,
                                                    int k_max, uint64_t seed) {
  if (x.rows != y.size()) throw Error(ErrorKind::kDimension, "rows and labels differ in length");
  std::vector<size_t> members[2];
  for (size_t i = 0; i < y.size(); ++i) members[y[i] == 1].push_back(i);
  if (members[0].empty() || members[1].empty()) {
    throw Error(ErrorKind::kDegenerate, "SMOTE needs both classes");
  }
  Matrix out = x;
  std::vector<int> labels = y;
  if (members[0].size() == members[1].size()) return {out, labels};
  const int minority = members[0].size() < members[1].size() ? 0 : 1;
  const auto& pool = members[minority];
  const size_t needed = members[1 - minority].size() - pool.size();
  Rng rng(seed);
  if (pool.size() == 1) {
    Warn("SMOTE: minority class has one sample; duplicating it");
    for (size_t s = 0; s < needed; ++s) {
      out.AppendRow(x.Row(pool[0]));
      labels.push_back(minority);
    }
    return {out, labels};
  }
  const size_t k = std::min<size_t>(std::max(1, k_max), pool.size() - 1);
  // Nearest minority neighbours of every minority row, ties broken by index.
  std::vector<std::vector<size_t>> neighbours(pool.size());
  for (size_t a = 0; a < pool.size(); ++a) {
    std::vector<std::pair<double, size_t>> dist;
    for (size_t b = 0; b < pool.size(); ++b) {
      if (a == b) continue;
      double s = 0.0;
      for (size_t c = 0; c < x.cols; ++c) {
        const double e = x(pool[a], c) - x(pool[b], c);
        s += e * e;
      }
      dist.emplace_back(s, b);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (size_t q = 0; q < k; ++q) neighbours[a].push_back(dist[q].second);
  }
  std::vector<double> row(x.cols);
  for (size_t s = 0; s < needed; ++s) {
    const size_t a = static_cast<size_t>(rng.UniformIndex(pool.size()));
    const size_t b = neighbours[a][static_cast<size_t>(rng.UniformIndex(k))];
    double gap = rng.Uniform01();
    while (gap == 0.0) gap = rng.Uniform01();
    for (size_t c = 0; c < x.cols; ++c) {
      row[c] = x(pool[a], c) + gap * (x(pool[b], c) - x(pool[a], c));
    }
    out.AppendRow(row.data());
    labels.push_back(minority);
  }
  return {out, labels};
}

// --- scoring --------------------------------------------------------------------

double MacroF1(const std::vector<int>& y_true, const std::vector<int>& y_pred,
               const std::vector<int>& labels) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::kDimension, "true and predicted labels differ in length");
  }
  if (y_true.empty()) throw Error(ErrorKind::kDimension, "macro F1 of an empty label list");
  if (labels.empty()) throw Error(ErrorKind::kConfig, "macro F1 needs a label set");
  double total = 0.0;
  for (int c : labels) {
    double tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < y_true.size(); ++i) {
      if (y_pred[i] == c && y_true[i] == c) ++tp;
      if (y_pred[i] == c && y_true[i] != c) ++fp;
      if (y_pred[i] != c && y_true[i] == c) ++fn;
    }
    const double den = 2 * tp + fp + fn;
    total += den > 0 ? 2 * tp / den : 0.0;
  }
  return total / labels.size();
}

// --- cross-validation -------------------------------------------------------

std::vector<double> CVResult::FoldF1() const {
  std::vector<double> out;
  for (const auto& f : folds) {
    if (!f.skipped) out.push_back(f.f1);
  }
  return out;
}

ordered_json CVResult::ToJson() const {
  ordered_json j;
  j["model"] = spec.ToJson();
  j["alteration_level"] = alteration_level;
  j["mean_f1"] = mean_f1;
  j["fold_f1"] = FoldF1();
  ordered_json fs = ordered_json::array();
  for (const auto& f : folds) {
    ordered_json o;
    o["fold"] = f.fold;
    o["skipped"] = f.skipped;
    if (f.skipped) {
      o["reason"] = f.reason;
    } else {
      o["f1"] = f.f1;
    }
    o["train_size"] = f.train_size;
    o["test_size"] = f.test_size;
    o["synthetic"] = f.synthetic;
    o["dropped_features"] = f.dropped_features;
    fs.push_back(o);
  }
  j["folds"] = fs;
  j["skipped_folds_policy"] = "excluded from mean";
  return j;
}

CVResult CVResult::FromJson(const ordered_json& j) {
  CVResult r;
  r.spec = ModelSpec::FromJson(j.at("model"));
  r.alteration_level = j.at("alteration_level").get<int>();
  r.mean_f1 = j.at("mean_f1").get<double>();
  for (const auto& o : j.at("folds")) {
    FoldOutcome f;
    f.fold = o.at("fold").get<int>();
    f.skipped = o.at("skipped").get<bool>();
    if (f.skipped) {
      f.reason = o.at("reason").get<std::string>();
    } else {
      f.f1 = o.at("f1").get<double>();
    }
    f.train_size = o.at("train_size").get<size_t>();
    f.test_size = o.at("test_size").get<size_t>();
    f.synthetic = o.at("synthetic").get<size_t>();
    f.dropped_features = o.at("dropped_features").get<std::vector<std::string>>();
    r.folds.push_back(std::move(f));
  }
  return r;
}

FoldAssignment GroupFoldsForTable(const FeatureTable& table, int k, uint64_t seed) {
  Corpus skeleton;
  for (size_t i = 0; i < table.doc_ids.size(); ++i) {
    Document d;
    d.id = table.doc_ids[i];
    d.subject_id = table.subject_ids[i];
    d.label = table.labels[i];
    skeleton.documents.push_back(std::move(d));
  }
  return GroupFolds(skeleton, k, seed);
}

CVResult CrossValidate(const FeatureTable& table, const FoldAssignment& folds,
                       const ModelSpec& spec, int jobs) {
  const std::set<std::string> label_set(table.labels.begin(), table.labels.end());
  if (label_set.size() != 2) {
    throw Error(ErrorKind::kDegenerate, "cross-validation needs exactly two labels, found " +
                                            std::to_string(label_set.size()));
  }
  const std::string positive = *label_set.rbegin();
  const size_t n = table.rows.size(), d = table.names.size();
  std::vector<int> y(n), fold_of(n);
  for (size_t i = 0; i < n; ++i) {
    y[i] = table.labels[i] == positive ? 1 : 0;
    fold_of[i] = folds.FoldOf(table.doc_ids[i]);
  }

  CVResult result;
  result.spec = spec;
  result.alteration_level = table.level;
  result.folds.resize(folds.k);
  ParallelFor(folds.k, jobs, [&](size_t f) {
    FoldOutcome& out = result.folds[f];
    out.fold = static_cast<int>(f);
    std::vector<size_t> train, test;
    for (size_t i = 0; i < n; ++i) (fold_of[i] == static_cast<int>(f) ? test : train).push_back(i);
    out.train_size = train.size();
    out.test_size = test.size();
    std::vector<int> ytrain, ytest;
    for (size_t i : train) ytrain.push_back(y[i]);
    for (size_t i : test) ytest.push_back(y[i]);
    const bool both = std::count(ytrain.begin(), ytrain.end(), 1) > 0 &&
                      std::count(ytrain.begin(), ytrain.end(), 0) > 0;
    if (!both || test.empty()) {
      out.skipped = true;
      out.reason = test.empty() ? "empty test fold" : "single-class training split";
      Warn("fold " + std::to_string(f) + " skipped: " + out.reason);
      return;
    }
    // Train-fold means stand in for absent values on both sides.
    std::vector<double> fill(d, 0.0);
    for (size_t c = 0; c < d; ++c) {
      double s = 0.0;
      size_t k = 0;
      for (size_t i : train) {
        if (table.rows[i][c]) {
          s += *table.rows[i][c];
          ++k;
        }
      }
      fill[c] = k > 0 ? s / k : 0.0;
    }
    auto build = [&](const std::vector<size_t>& idx) {
      Matrix m(idx.size(), d);
      for (size_t r = 0; r < idx.size(); ++r) {
        for (size_t c = 0; c < d; ++c) m(r, c) = table.rows[idx[r]][c].value_or(fill[c]);
      }
      return m;
    };
    const Matrix xtrain = build(train), xtest = build(test);
    auto [xs, ys] = SmoteOversample(xtrain, ytrain, 5, DeriveSeed(spec.seed, "smote", f));
    out.synthetic = xs.rows - xtrain.rows;
    ModelSpec fold_spec = spec;
    fold_spec.seed = DeriveSeed(spec.seed, "fold", f);
    const Model model = Train(fold_spec, xs, ys);
    for (size_t c : model.dropped_columns()) out.dropped_features.push_back(table.names[c]);
    out.f1 = MacroF1(ytest, model.Predict(xtest));
  });
  const auto f1 = result.FoldF1();
  if (f1.empty()) throw Error(ErrorKind::kDegenerate, "every cross-validation fold was skipped");
  result.mean_f1 = std::accumulate(f1.begin(), f1.end(), 0.0) / f1.size();
  return result;
}

}  // namespace lexsyn::models
