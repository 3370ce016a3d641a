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

#include "lexsyn/pipeline.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <type_traits>

#include "lexsyn/csv.h"
#include "lexsyn/embedded_data.h"
#include "lexsyn/features.h"
#include "lexsyn/profile.h"
#include "lexsyn/synfeat.h"

namespace lexsyn::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Files

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes through a temporary file so an interrupted run never leaves a
// truncated artifact under the final name.
void WriteFile(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot rename into " + path.string() + ": " + ec.message());
}

std::string LevelCorpusPath(int level) { return "levels/corpus_L" + std::to_string(level) + ".jsonl"; }
std::string FeaturePath(int level) { return "features/features_L" + std::to_string(level) + ".csv"; }
std::string ZPath(int level) { return "zscores/z_L" + std::to_string(level) + ".csv"; }

// ---------------------------------------------------------------------------
// Config parsing

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitList(std::string_view s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    std::string item = Trim(s.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void BadValue(const std::string& where, const std::string& key,
                           const std::string& expected) {
  throw Error(ErrorKind::kConfig, where + ": " + key + " expects " + expected);
}

template <typename T>
T ParseNumber(const std::string& text, const std::string& where, const std::string& key) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    BadValue(where, key, std::is_integral_v<T> ? "an integer" : "a number");
  }
  return value;
}

double ParseReal(const std::string& text, const std::string& where, const std::string& key) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    BadValue(where, key, "a number");
  }
  return v;
}

// An error's message without its "<kind> error: " prefix.
std::string Detail(const Error& e) {
  std::string detail = e.what();
  const std::string prefix = std::string(ErrorKindName(e.kind())) + " error: ";
  if (detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
  return detail;
}

// Rethrows a module's validation error as a configuration error.
template <typename Fn>
auto AsConfig(const std::string& where, Fn fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig && where.empty()) throw;
    throw Error(ErrorKind::kConfig, where.empty() ? Detail(e) : where + ": " + Detail(e));
  }
}

// First stage whose output depends on each config key. An artifact records
// a hash of the keys up to and including its own stage.
const std::map<std::string, Stage>& KeyStages() {
  static const std::map<std::string, Stage> kKeys{
      {"corpus", Stage::kIngest},
      {"corpus_format", Stage::kIngest},
      {"corpus_name", Stage::kIngest},
      {"seed", Stage::kPerturb},
      {"levels", Stage::kPerturb},
      {"tree_strategy", Stage::kPerturb},
      {"parser_command", Stage::kPerturb},
      {"wordlist", Stage::kExtract},
      {"sophistication_cutoff", Stage::kExtract},
      {"segment_size", Stage::kExtract},
      {"random_samples", Stage::kExtract},
      {"patterns", Stage::kExtract},
      {"dlevel_rules", Stage::kExtract},
      {"models", Stage::kEvaluate},
      {"folds", Stage::kEvaluate},
      {"svm_gamma", Stage::kEvaluate},
      {"mlp_batch", Stage::kEvaluate},
      {"significance", Stage::kAnalyze},
      {"aggregation", Stage::kAnalyze},
      {"aggregation_order", Stage::kAnalyze},
      {"reference_values", Stage::kReport},
  };
  return kKeys;
}

std::string ConfigFingerprint(const PipelineConfig& config, Stage stage) {
  ordered_json full = config.ToJson();
  ordered_json slice = ordered_json::object();
  for (const auto& [key, value] : full.items()) {
    auto it = KeyStages().find(key);
    if (it != KeyStages().end() && it->second <= stage) slice[key] = value;
  }
  return Sha256Hex(slice.dump());
}

std::string FileName(const fs::path& p) { return p.empty() ? std::string() : p.filename().string(); }

// ---------------------------------------------------------------------------
// Manifest

struct Artifact {
  Stage stage = Stage::kIngest;
  std::string sha256;
  std::string config;  // fingerprint of the producing stage's config keys
  std::map<std::string, std::string> inputs;
};

class Manifest {
 public:
  explicit Manifest(fs::path out) : out_(std::move(out)) {
    const fs::path file = out_ / "manifest.json";
    if (!fs::exists(file)) return;
    ordered_json j;
    try {
      j = ordered_json::parse(ReadFile(file));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kStale, "manifest.json is unreadable: " + std::string(e.what()));
    }
    for (const auto& [rel, a] : j.at("artifacts").items()) {
      Artifact art;
      art.stage = ParseStage(a.at("stage").get<std::string>());
      art.sha256 = a.at("sha256").get<std::string>();
      art.config = a.at("config").get<std::string>();
      for (const auto& [in, sha] : a.at("inputs").items()) art.inputs[in] = sha.get<std::string>();
      artifacts_[rel] = art;
    }
  }

  // Verifies an upstream artifact and returns its hash.
  std::string Check(const std::string& rel, const PipelineConfig& config) const {
    auto it = artifacts_.find(rel);
    const fs::path file = out_ / rel;
    if (it == artifacts_.end() || !fs::exists(file)) {
      throw Error(ErrorKind::kStale, "missing upstream artifact " + rel);
    }
    const Artifact& a = it->second;
    if (FileSha256(file) != a.sha256) {
      throw Error(ErrorKind::kStale, rel + " does not match its manifest hash");
    }
    for (const auto& [in, sha] : a.inputs) {
      auto up = artifacts_.find(in);
      if (up != artifacts_.end() && up->second.sha256 != sha) {
        throw Error(ErrorKind::kStale, rel + " was built from an older " + in);
      }
    }
    if (a.config != ConfigFingerprint(config, a.stage)) {
      throw Error(ErrorKind::kStale,
                  rel + " was built under a different configuration; rerun " + StageName(a.stage));
    }
    return a.sha256;
  }

  void ClearStage(Stage stage) {
    std::erase_if(artifacts_, [&](const auto& kv) { return kv.second.stage == stage; });
  }

  void Record(const std::string& rel, std::string_view content, Stage stage,
              const PipelineConfig& config, std::map<std::string, std::string> inputs) {
    WriteFile(out_ / rel, content);
    artifacts_[rel] = Artifact{stage, Sha256Hex(content), ConfigFingerprint(config, stage),
                               std::move(inputs)};
  }

  void Save() const {
    ordered_json arts = ordered_json::object();
    for (const auto& [rel, a] : artifacts_) {
      ordered_json o;
      o["stage"] = StageName(a.stage);
      o["sha256"] = a.sha256;
      o["config"] = a.config;
      ordered_json in = ordered_json::object();
      for (const auto& [k, v] : a.inputs) in[k] = v;
      o["inputs"] = in;
      arts[rel] = o;
    }
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["artifacts"] = arts;
    WriteFile(out_ / "manifest.json", j.dump(2) + "\n");
  }

  std::map<std::string, std::string> Hashes(Stage up_to) const {
    std::map<std::string, std::string> out;
    for (const auto& [rel, a] : artifacts_) {
      if (a.stage <= up_to && rel.rfind("source:", 0) != 0) out[rel] = a.sha256;
    }
    return out;
  }

 private:
  fs::path out_;
  std::map<std::string, Artifact> artifacts_;
};

// ---------------------------------------------------------------------------
// Shared loading

struct Resources {
  std::optional<synfeat::SyntaxResources> custom;
  const synfeat::SyntaxResources& get() const {
    return custom ? *custom : synfeat::SyntaxResources::Default();
  }
};

Resources LoadResources(const PipelineConfig& config) {
  Resources r;
  if (!config.patterns.empty() || !config.dlevel_rules.empty()) {
    std::string units = config.patterns.empty() ? std::string(data::ProductionUnitPatterns())
                                                : ReadFile(config.patterns);
    std::string rules = config.dlevel_rules.empty() ? std::string(data::DLevelRuleTable())
                                                    : ReadFile(config.dlevel_rules);
    r.custom = synfeat::SyntaxResources::FromText(units, rules);
  }
  return r;
}

Corpus LoadArtifactCorpus(const fs::path& file, const std::string& name) {
  Corpus c = ParseCorpus(ReadFile(file), CorpusFormat::kJsonl, name);
  return c;
}

std::vector<int> AllLevels(const PipelineConfig& config) {
  std::vector<int> levels{0};
  levels.insert(levels.end(), config.plan.levels.begin(), config.plan.levels.end());
  return levels;
}

ordered_json ValueJson(const Value& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

// ---------------------------------------------------------------------------
// Stages

void Ingest(const PipelineConfig& config, Manifest* m) {
  const std::string source_sha = FileSha256(config.corpus);
  Corpus corpus = LoadCorpus(config.corpus, config.corpus_format);
  corpus.name = config.corpus_name;
  ValidateCorpus(corpus);
  m->ClearStage(Stage::kIngest);
  m->Record("corpus.jsonl", SerializeCorpus(corpus), Stage::kIngest, config,
            {{"source:" + FileName(config.corpus), source_sha}});
}

void Perturb(const PipelineConfig& config, Manifest* m) {
  const std::string in_sha = m->Check("corpus.jsonl", config);
  Corpus corpus = LoadArtifactCorpus(config.out / "corpus.jsonl", config.corpus_name);
  auto levels = perturb::PerturbCorpus(corpus, config.plan, config.jobs);
  m->ClearStage(Stage::kPerturb);
  for (const auto& [level, altered] : levels) {
    m->Record(LevelCorpusPath(level), SerializeCorpus(altered), Stage::kPerturb, config,
              {{"corpus.jsonl", in_sha}});
  }
}

FeatureTable ExtractTable(const Corpus& corpus, int level, const lexfeat::LexicalConfig& lex,
                          const lexfeat::Wordlist& wordlist, const synfeat::SyntaxResources& res,
                          int jobs) {
  std::vector<FeatureVector> vectors(corpus.documents.size());
  ParallelFor(corpus.documents.size(), jobs, [&](size_t i) {
    const Document& d = corpus.documents[i];
    FeatureVector v = lexfeat::ExtractLexical(d, lex, wordlist);
    v.Append(synfeat::ExtractSyntactic(d, res));
    vectors[i] = std::move(v);
  });
  FeatureTable table;
  table.level = level;
  for (size_t i = 0; i < vectors.size(); ++i) {
    const Document& d = corpus.documents[i];
    table.AddRow(d.id, d.subject_id, d.label, vectors[i]);
  }
  return table;
}

void Extract(const PipelineConfig& config, Manifest* m) {
  std::map<int, std::string> inputs{{0, "corpus.jsonl"}};
  for (int level : config.plan.levels) inputs[level] = LevelCorpusPath(level);
  std::map<int, std::string> shas;
  for (const auto& [level, rel] : inputs) shas[level] = m->Check(rel, config);

  const auto wordlist = lexfeat::Wordlist::Load(config.wordlist);
  const Resources res = LoadResources(config);
  m->ClearStage(Stage::kExtract);
  for (const auto& [level, rel] : inputs) {
    Corpus corpus = LoadArtifactCorpus(config.out / rel, config.corpus_name);
    FeatureTable t = ExtractTable(corpus, level, config.lexical, wordlist, res.get(), config.jobs);
    m->Record(FeaturePath(level), t.ToCsv(), Stage::kExtract, config, {{rel, shas[level]}});
  }
}

std::map<int, FeatureTable> LoadFeatureTables(const PipelineConfig& config, const Manifest& m,
                                              std::map<std::string, std::string>* inputs) {
  std::map<int, FeatureTable> tables;
  for (int level : AllLevels(config)) {
    const std::string rel = FeaturePath(level);
    (*inputs)[rel] = m.Check(rel, config);
    tables[level] = FeatureTable::FromCsv(ReadFile(config.out / rel), level);
  }
  return tables;
}

void Evaluate(const PipelineConfig& config, Manifest* m) {
  std::map<std::string, std::string> inputs;
  auto tables = LoadFeatureTables(config, *m, &inputs);
  const FoldAssignment folds = models::GroupFoldsForTable(tables.at(0), config.folds, config.FoldSeed());

  ordered_json results = ordered_json::array();
  for (auto kind : config.models) {
    const models::ModelSpec spec = config.Spec(kind);
    for (const auto& [level, table] : tables) {
      try {
        models::CVResult r = models::CrossValidate(table, folds, spec, config.jobs);
        r.alteration_level = level;
        results.push_back(r.ToJson());
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDegenerate) throw;
        ordered_json failed;
        failed["model"] = spec.ToJson();
        failed["alteration_level"] = level;
        failed["error"] = e.what();
        results.push_back(failed);
      }
    }
  }
  ordered_json assignment = ordered_json::object();
  for (const auto& [doc, fold] : folds.fold_of) assignment[doc] = fold;

  ordered_json j;
  j["folds"] = config.folds;
  j["fold_seed"] = config.FoldSeed();
  j["fold_of"] = assignment;
  j["results"] = results;
  m->ClearStage(Stage::kEvaluate);
  m->Record("cv_results.json", j.dump(2) + "\n", Stage::kEvaluate, config, inputs);
}

std::string RunId(const PipelineConfig& config, const std::string& corpus_sha) {
  return Sha256Hex(config.ToJson().dump() + "\n" + corpus_sha).substr(0, 16);
}

void Analyze(const PipelineConfig& config, Manifest* m) {
  std::map<std::string, std::string> inputs;
  inputs["corpus.jsonl"] = m->Check("corpus.jsonl", config);
  auto tables = LoadFeatureTables(config, *m, &inputs);
  inputs["cv_results.json"] = m->Check("cv_results.json", config);
  const ordered_json cv = ordered_json::parse(ReadFile(config.out / "cv_results.json"));
  const std::string run_id = RunId(config, inputs["corpus.jsonl"]);
  const Resources res = LoadResources(config);
  ordered_json failures = ordered_json::array();
  std::map<std::string, std::string> outputs;

  // Dataset profile.
  const Corpus corpus = LoadArtifactCorpus(config.out / "corpus.jsonl", config.corpus_name);
  const DatasetProfile profile = ProfileCorpus(corpus, res.get(), config.jobs);
  ordered_json profile_rows = ordered_json::array();
  {
    CsvWriter w;
    w.Row({"key", "section", "value", "documents"});
    for (const auto& r : profile.rows) {
      w.Row({r.key, r.section, FormatValue(r.value), std::to_string(r.documents)});
      profile_rows.push_back(
          {{"key", r.key}, {"section", r.section}, {"value", ValueJson(r.value)}, {"documents", r.documents}});
    }
    outputs["profile.csv"] = w.str();
  }

  // Feature-change z-scores.
  const FeatureTable& base = tables.at(0);
  const stats::ZScoreTable z0 = stats::FeatureZscores(base, base);
  std::map<int, stats::GroupZ> group_z;
  ordered_json z_rows = ordered_json::array();
  {
    CsvWriter w;
    w.Row({"level", "z_lexical", "z_syntactic", "n_lexical", "n_syntactic"});
    for (const auto& [level, table] : tables) {
      stats::ZScoreTable z = stats::FeatureZscores(base, table);
      outputs[ZPath(level)] = z.ToCsv();
      stats::GroupZ g = stats::GroupZscore(z, &z0, config.aggregation, config.aggregation_order);
      g.level = level;
      group_z[level] = g;
      w.Row({std::to_string(level), FormatDouble(g.lexical), FormatDouble(g.syntactic),
             std::to_string(g.n_lexical), std::to_string(g.n_syntactic)});
      z_rows.push_back({{"level", level},
                        {"lexical", g.lexical},
                        {"syntactic", g.syntactic},
                        {"n_lexical", g.n_lexical},
                        {"n_syntactic", g.n_syntactic},
                        {"excluded", z.excluded}});
    }
    outputs["zscores.csv"] = w.str();
  }

  // Cross-validation summary and F1 deltas.
  std::map<std::string, std::map<int, double>> f1;  // model -> level -> mean F1
  std::vector<std::string> model_names;
  ordered_json cv_rows = ordered_json::array();
  {
    CsvWriter w;
    w.Row({"model", "level", "mean_f1", "folds_used", "folds_skipped"});
    for (const auto& r : cv.at("results")) {
      const std::string model = r.at("model").at("kind").get<std::string>();
      const int level = r.at("alteration_level").get<int>();
      if (std::find(model_names.begin(), model_names.end(), model) == model_names.end()) {
        model_names.push_back(model);
      }
      if (r.contains("error")) {
        failures.push_back({{"stage", "evaluate"}, {"model", model}, {"level", level},
                            {"error", r.at("error")}});
        cv_rows.push_back({{"model", model}, {"level", level}, {"error", r.at("error")}});
        w.Row({model, std::to_string(level), "NA", "0", std::to_string(config.folds)});
        continue;
      }
      int used = 0;
      int skipped = 0;
      for (const auto& f : r.at("folds")) {
        if (f.at("skipped").get<bool>()) {
          ++skipped;
          failures.push_back({{"stage", "evaluate"}, {"model", model}, {"level", level},
                              {"fold", f.at("fold")}, {"error", f.at("reason")}});
        } else {
          ++used;
        }
      }
      const double mean = r.at("mean_f1").get<double>();
      f1[model][level] = mean;
      cv_rows.push_back({{"model", model}, {"level", level}, {"mean_f1", mean},
                         {"folds_used", used}, {"folds_skipped", skipped}});
      w.Row({model, std::to_string(level), FormatDouble(mean), std::to_string(used),
             std::to_string(skipped)});
    }
    outputs["cv.csv"] = w.str();
  }

  ordered_json delta_rows = ordered_json::array();
  std::map<std::string, std::map<int, double>> deltas;
  {
    CsvWriter w;
    w.Row({"model", "level", "f1", "baseline_f1", "delta_f1"});
    for (const auto& model : model_names) {
      const auto& by_level = f1[model];
      auto base_it = by_level.find(0);
      for (int level : config.plan.levels) {
        auto it = by_level.find(level);
        if (base_it == by_level.end() || it == by_level.end()) continue;
        const double d = stats::F1Delta(it->second, base_it->second);
        deltas[model][level] = d;
        delta_rows.push_back({{"model", model}, {"level", level}, {"f1", it->second},
                              {"baseline_f1", base_it->second}, {"delta_f1", d}});
        w.Row({model, std::to_string(level), FormatDouble(it->second),
               FormatDouble(base_it->second), FormatDouble(d)});
      }
    }
    outputs["f1_delta.csv"] = w.str();
  }

  // Importance regression per model.
  ordered_json importance_rows = ordered_json::array();
  {
    CsvWriter w;
    w.Row({"model", "alpha_syntactic", "beta_lexical", "ratio", "sign_disagreement", "points",
           "error"});
    for (const auto& model : model_names) {
      std::vector<double> d;
      std::vector<double> zs;
      std::vector<double> zl;
      std::vector<int> used;
      for (const auto& [level, delta] : deltas[model]) {
        d.push_back(delta);
        zs.push_back(group_z.at(level).syntactic);
        zl.push_back(group_z.at(level).lexical);
        used.push_back(level);
      }
      ordered_json row{{"model", model}, {"levels", used}};
      try {
        const stats::ImportanceFit fit = stats::FitImportance(d, zs, zl);
        row["alpha"] = fit.alpha;
        row["beta"] = fit.beta;
        row["ratio"] = fit.ratio ? ordered_json(*fit.ratio) : ordered_json(nullptr);
        row["sign_disagreement"] = fit.sign_disagreement;
        row["residuals"] = fit.residuals;
        w.Row({model, FormatDouble(fit.alpha), FormatDouble(fit.beta), FormatValue(fit.ratio),
               fit.sign_disagreement ? "true" : "false", std::to_string(used.size()), ""});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDegenerate) throw;
        row["error"] = e.what();
        failures.push_back({{"stage", "analyze"}, {"model", model}, {"error", e.what()}});
        w.Row({model, "NA", "NA", "NA", "false", std::to_string(used.size()), e.what()});
      }
      importance_rows.push_back(row);
    }
    outputs["importance.csv"] = w.str();
  }

  // Significance ranks and their change under alteration.
  std::map<int, stats::RankTable> ranks;
  for (const auto& [level, table] : tables) {
    ranks[level] = stats::RankFeatures(table, config.significance, config.jobs);
    ranks[level].level = level;
  }
  std::map<int, stats::RankDeltaTable> rank_deltas;
  int max_abs = 0;
  for (int level : config.plan.levels) {
    rank_deltas[level] = stats::RankDeltas(ranks.at(0), ranks.at(level));
    rank_deltas[level].level = level;
    for (const auto& c : rank_deltas[level].deltas) {
      if (c.base_significant) max_abs = std::max(max_abs, std::abs(c.delta));
    }
  }
  ordered_json rank_rows = ordered_json::array();
  ordered_json rank_summary = ordered_json::array();
  {
    CsvWriter w;
    w.Row({"feature", "group", "level", "p", "rank", "significant", "base_rank",
           "base_significant", "delta", "color"});
    const auto& base_entries = ranks.at(0).entries;
    for (size_t i = 0; i < base_entries.size(); ++i) {
      const auto& b = base_entries[i];
      ordered_json per_level = ordered_json::object();
      w.Row({b.name, FeatureGroupName(b.group), "0", FormatDouble(b.p), std::to_string(b.rank),
             b.significant ? "true" : "false", std::to_string(b.rank),
             b.significant ? "true" : "false", "0", ""});
      for (int level : config.plan.levels) {
        const auto& e = ranks.at(level).entries[i];
        const auto& c = rank_deltas.at(level).deltas[i];
        const std::string color = stats::HeatmapColor(c, max_abs);
        per_level[std::to_string(level)] = {{"p", e.p}, {"rank", e.rank},
                                            {"significant", e.significant},
                                            {"delta", c.delta}, {"color", color}};
        w.Row({b.name, FeatureGroupName(b.group), std::to_string(level), FormatDouble(e.p),
               std::to_string(e.rank), e.significant ? "true" : "false", std::to_string(b.rank),
               b.significant ? "true" : "false", std::to_string(c.delta), color});
      }
      rank_rows.push_back({{"feature", b.name}, {"group", FeatureGroupName(b.group)},
                           {"base_p", b.p}, {"base_rank", b.rank},
                           {"base_significant", b.significant}, {"levels", per_level}});
    }
    for (int level : config.plan.levels) {
      for (const auto& s : rank_deltas.at(level).summary) {
        rank_summary.push_back({{"level", level}, {"group", FeatureGroupName(s.group)},
                                {"max_increase", s.max_increase},
                                {"became_insignificant", ValueJson(s.became_insignificant)}});
      }
    }
    outputs["rank_changes.csv"] = w.str();
  }

  ordered_json t;
  t["profile"] = {{"run_id", run_id}, {"corpus", profile.corpus}, {"rows", profile_rows}};
  t["zscores"] = {{"run_id", run_id},
                  {"aggregation", stats::AggregationName(config.aggregation)},
                  {"order", stats::AggregationOrderName(config.aggregation_order)},
                  {"sigma", "population"},
                  {"rows", z_rows}};
  t["cv_results"] = {{"run_id", run_id}, {"folds", config.folds}, {"rows", cv_rows}};
  t["f1_delta"] = {{"run_id", run_id}, {"rows", delta_rows}};
  t["importance"] = {{"run_id", run_id}, {"model", "delta_f1 = alpha * z_syntactic + beta * z_lexical"},
                     {"rows", importance_rows}};
  t["rank_changes"] = {{"run_id", run_id}, {"threshold", config.significance},
                       {"levels", config.plan.levels}, {"max_abs_delta", max_abs},
                       {"rows", rank_rows}, {"summary", rank_summary}};
  ordered_json analysis;
  analysis["run_id"] = run_id;
  analysis["tables"] = t;
  analysis["failures"] = failures;

  m->ClearStage(Stage::kAnalyze);
  for (const auto& [rel, content] : outputs) {
    m->Record(rel, content, Stage::kAnalyze, config, inputs);
  }
  m->Record("analysis.json", analysis.dump(2) + "\n", Stage::kAnalyze, config, inputs);
}

ordered_json Decisions(const PipelineConfig& config) {
  ordered_json d = ordered_json::object();
  d["sigma"] = "population standard deviation over the unaltered corpus";
  d["aggregation"] = std::string(stats::AggregationName(config.aggregation)) + ", " +
                     stats::AggregationOrderName(config.aggregation_order);
  d["zero_sigma_features"] = "excluded from their group";
  d["ngram_scope"] = "n-grams do not cross sentence boundaries";
  d["deletion_units"] = "word tokens; punctuation is kept and wordless sentences are dropped";
  d["tree_strategy"] = perturb::TreeStrategyName(config.plan.tree_strategy);
  d["svm_gamma"] = config.svm_gamma ? ordered_json(*config.svm_gamma)
                                    : ordered_json("1 / (features * variance)");
  d["mlp_batch"] = config.mlp_batch == 0 ? ordered_json("full") : ordered_json(config.mlp_batch);
  d["imputation"] = "absent values replaced by training-fold column means";
  d["oversampling"] = "SMOTE on training folds, k = min(5, minority - 1)";
  d["skipped_folds"] = "single-class training folds are skipped and excluded from the mean";
  d["significance"] = config.significance;
  d["importance_fit"] = "least squares without intercept; rank-deficient designs emit no ratio";
  return d;
}

void Report(const PipelineConfig& config, Manifest* m) {
  std::map<std::string, std::string> inputs;
  inputs["analysis.json"] = m->Check("analysis.json", config);
  inputs["cv_results.json"] = m->Check("cv_results.json", config);
  const ordered_json analysis = ordered_json::parse(ReadFile(config.out / "analysis.json"));
  const ordered_json cv = ordered_json::parse(ReadFile(config.out / "cv_results.json"));
  const Resources res = LoadResources(config);

  ordered_json run;
  run["run_id"] = analysis.at("run_id");
  run["tool_version"] = kToolVersion;
  run["config"] = config.ToJson();
  run["seeds"] = {{"master", config.seed},
                  {"perturb", config.plan.seed},
                  {"lexical", config.lexical.seed},
                  {"folds", config.FoldSeed()}};
  ordered_json model_seeds = ordered_json::object();
  for (auto kind : config.models) model_seeds[models::ModelKindName(kind)] = config.Spec(kind).seed;
  run["seeds"]["models"] = model_seeds;
  run["versions"] = {{"tool", kToolVersion},
                     {"syntax_resources", res.get().Version()},
                     {"wordlist_sha256", FileSha256(config.wordlist)}};
  run["decisions"] = Decisions(config);
  ordered_json arts = ordered_json::object();
  for (const auto& [rel, sha] : m->Hashes(Stage::kAnalyze)) arts[rel] = sha;
  run["artifacts"] = arts;

  ordered_json bundle;
  bundle["format"] = "lexsyn-report/1";
  bundle["run"] = run;
  bundle["tables"] = analysis.at("tables");
  bundle["cv_details"] = cv;
  bundle["failures"] = analysis.at("failures");
  if (!config.reference_values.empty()) {
    bundle["reference_annotations"] = ordered_json::parse(ReadFile(config.reference_values));
  }

  m->ClearStage(Stage::kReport);
  const std::string text = bundle.dump(2) + "\n";
  m->Record("bundle.json", text, Stage::kReport, config, inputs);
  // Plots are written by EmitPlots and then hashed into the manifest.
  const fs::path plots = config.out / "plots";
  for (const auto& p : EmitPlots(bundle, plots)) {
    const std::string rel = "plots/" + p.filename().string();
    m->Record(rel, ReadFile(p), Stage::kReport, config, {{"bundle.json", Sha256Hex(text)}});
  }
}

// ---------------------------------------------------------------------------
// SVG

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}
  void Line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1) {
    body_ += "  <line x1=\"" + Num(x1) + "\" y1=\"" + Num(y1) + "\" x2=\"" + Num(x2) + "\" y2=\"" +
             Num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + Num(width) + "\"/>\n";
  }
  void Rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none") {
    body_ += "  <rect x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" width=\"" + Num(w) +
             "\" height=\"" + Num(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>\n";
  }
  void Circle(double x, double y, double r, const std::string& fill) {
    body_ += "  <circle cx=\"" + Num(x) + "\" cy=\"" + Num(y) + "\" r=\"" + Num(r) + "\" fill=\"" +
             fill + "\"/>\n";
  }
  void Polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    std::string p;
    for (const auto& [x, y] : pts) p += Num(x) + "," + Num(y) + " ";
    if (!p.empty()) p.pop_back();
    body_ += "  <polyline points=\"" + p + "\" fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"2\"/>\n";
  }
  void Text(double x, double y, std::string_view text, const std::string& anchor = "start",
            int size = 12) {
    body_ += "  <text x=\"" + Num(x) + "\" y=\"" + Num(y) + "\" font-size=\"" +
             std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + XmlEscape(text) +
             "</text>\n";
  }
  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(w_) + "\" height=\"" +
           Num(h_) + "\" viewBox=\"0 0 " + Num(w_) + " " + Num(h_) + "\" font-family=\"sans-serif\">\n"
           "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
  }

 private:
  double w_;
  double h_;
  std::string body_;
};

constexpr const char* kLexicalColor = "#1f77b4";
constexpr const char* kSyntacticColor = "#d62728";

std::string ZscorePlot(const ordered_json& table) {
  const double w = 640, h = 400, left = 60, right = 150, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  std::vector<double> levels, lex, syn;
  for (const auto& r : table.at("rows")) {
    levels.push_back(r.at("level").get<double>());
    lex.push_back(r.at("lexical").get<double>());
    syn.push_back(r.at("syntactic").get<double>());
  }
  double xmax = 100.0;
  double ymax = 0.0;
  for (double v : lex) ymax = std::max(ymax, std::abs(v));
  for (double v : syn) ymax = std::max(ymax, std::abs(v));
  ymax = ymax > 0 ? ymax * 1.1 : 1.0;
  double ymin = 0.0;
  for (double v : lex) ymin = std::min(ymin, v * 1.1);
  for (double v : syn) ymin = std::min(ymin, v * 1.1);
  auto px = [&](double x) { return left + pw * x / xmax; };
  auto py = [&](double y) { return top + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  Svg s(w, h);
  s.Text(w / 2, 22, "Feature change by alteration level", "middle", 14);
  s.Line(left, top + ph, left + pw, top + ph, "black");
  s.Line(left, top, left, top + ph, "black");
  for (int x = 0; x <= 100; x += 20) {
    s.Line(px(x), top + ph, px(x), top + ph + 5, "black");
    s.Text(px(x), top + ph + 18, std::to_string(x), "middle");
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = ymin + (ymax - ymin) * i / 4.0;
    s.Line(left - 5, py(y), left, py(y), "black");
    s.Text(left - 8, py(y) + 4, Num(y), "end");
  }
  s.Text(left + pw / 2, h - 12, "alteration level (%)", "middle");
  s.Text(16, top + ph / 2, "Z", "middle");
  for (int g = 0; g < 2; ++g) {
    const auto& ys = g == 0 ? lex : syn;
    const char* color = g == 0 ? kLexicalColor : kSyntacticColor;
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < levels.size(); ++i) pts.emplace_back(px(levels[i]), py(ys[i]));
    s.Polyline(pts, color);
    for (const auto& [x, y] : pts) s.Circle(x, y, 3.5, color);
    s.Line(left + pw + 20, top + 20 + 20 * g, left + pw + 44, top + 20 + 20 * g, color, 2);
    s.Text(left + pw + 50, top + 24 + 20 * g, g == 0 ? "lexical" : "syntactic");
  }
  return s.str();
}

std::string ImportancePlot(const ordered_json& table) {
  const auto& rows = table.at("rows");
  const double left = 60, top = 40, bottom = 50, right = 150, group_w = 90, h = 400;
  const double w = left + right + group_w * std::max<size_t>(rows.size(), 1);
  const double ph = h - top - bottom;
  double vmax = 0.0, vmin = 0.0;
  for (const auto& r : rows) {
    if (r.contains("error")) continue;
    for (const char* k : {"alpha", "beta"}) {
      vmax = std::max(vmax, r.at(k).get<double>());
      vmin = std::min(vmin, r.at(k).get<double>());
    }
  }
  if (vmax == vmin) vmax = vmin + 1.0;
  const double pad = 0.1 * (vmax - vmin);
  vmax += vmax > 0 ? pad : 0;
  vmin -= vmin < 0 ? pad : 0;
  auto py = [&](double y) { return top + ph * (1.0 - (y - vmin) / (vmax - vmin)); };

  Svg s(w, h);
  s.Text(w / 2, 22, "Importance coefficients per model", "middle", 14);
  s.Line(left, top, left, top + ph, "black");
  s.Line(left, py(0), w - right, py(0), "black");
  for (int i = 0; i <= 4; ++i) {
    const double y = vmin + (vmax - vmin) * i / 4.0;
    s.Line(left - 5, py(y), left, py(y), "black");
    s.Text(left - 8, py(y) + 4, Num(y), "end");
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double x0 = left + group_w * i + 15;
    s.Text(x0 + 30, top + ph + 20, r.at("model").get<std::string>(), "middle");
    if (r.contains("error")) {
      s.Text(x0 + 30, py(0) - 6, "no fit", "middle", 10);
      continue;
    }
    const double a = r.at("alpha").get<double>();
    const double b = r.at("beta").get<double>();
    s.Rect(x0, std::min(py(a), py(0)), 28, std::abs(py(a) - py(0)), kSyntacticColor);
    s.Rect(x0 + 32, std::min(py(b), py(0)), 28, std::abs(py(b) - py(0)), kLexicalColor);
  }
  s.Rect(w - right + 20, top + 12, 14, 14, kSyntacticColor);
  s.Text(w - right + 40, top + 24, "alpha (syntactic)");
  s.Rect(w - right + 20, top + 32, 14, 14, kLexicalColor);
  s.Text(w - right + 40, top + 44, "beta (lexical)");
  return s.str();
}

std::string HeatmapPlot(const ordered_json& table) {
  static const std::map<std::string, std::string> kFill{
      {"white", "#ffffff"}, {"blue", "#4a7bd0"}, {"red", "#d0504a"}, {"yellow", "#f2d649"}};
  const auto& rows = table.at("rows");
  std::vector<std::string> levels;
  for (const auto& l : table.at("levels")) levels.push_back(std::to_string(l.get<int>()));
  const double left = 190, top = 50, cell_w = 56, cell_h = 16;
  const double w = left + cell_w * levels.size() + 30;
  const double h = top + cell_h * rows.size() + 60;
  Svg s(w, h);
  s.Text(w / 2, 22, "Significance rank change", "middle", 14);
  for (size_t c = 0; c < levels.size(); ++c) {
    s.Text(left + cell_w * (c + 0.5), top - 8, levels[c] + "%", "middle");
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const double y = top + cell_h * r;
    s.Text(left - 8, y + cell_h - 4, row.at("feature").get<std::string>() + " (" +
                                         row.at("group").get<std::string>().substr(0, 3) + ")",
           "end", 10);
    for (size_t c = 0; c < levels.size(); ++c) {
      const auto& cell = row.at("levels").at(levels[c]);
      const std::string color = cell.at("color").get<std::string>();
      s.Rect(left + cell_w * c, y, cell_w, cell_h, kFill.at(color), "#999999");
      if (color != "white") {
        s.Text(left + cell_w * (c + 0.5), y + cell_h - 4, std::to_string(cell.at("delta").get<int>()),
               "middle", 10);
      }
    }
  }
  const double ly = top + cell_h * rows.size() + 20;
  double lx = 20;
  for (const char* c : {"white", "blue", "red", "yellow"}) {
    s.Rect(lx, ly, 14, 14, kFill.at(c), "#999999");
    s.Text(lx + 18, ly + 12, c, "start", 10);
    lx += 70;
  }
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// PipelineConfig

PipelineConfig PipelineConfig::Parse(std::string_view text, const fs::path& base_dir) {
  PipelineConfig c;
  std::set<std::string> seen;
  bool format_set = false;
  uint64_t seed = 0;
  auto path_of = [&](const std::string& v) {
    fs::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const std::string where = "config line " + std::to_string(lineno);
    const size_t eq = trimmed.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kConfig, where + ": expected key = value");
    const std::string key = Trim(std::string_view(trimmed).substr(0, eq));
    const std::string value = Trim(std::string_view(trimmed).substr(eq + 1));
    if (!KeyStages().count(key) && key != "out" && key != "jobs") {
      throw Error(ErrorKind::kConfig, where + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::kConfig, where + ": duplicate key '" + key + "'");
    }

    if (key == "corpus") {
      c.corpus = path_of(value);
    } else if (key == "corpus_format") {
      c.corpus_format = AsConfig(where, [&] { return ParseCorpusFormat(value); });
      format_set = true;
    } else if (key == "corpus_name") {
      c.corpus_name = value;
    } else if (key == "seed") {
      seed = ParseNumber<uint64_t>(value, where, key);
    } else if (key == "levels") {
      c.plan.levels.clear();
      for (const auto& item : SplitList(value)) {
        c.plan.levels.push_back(ParseNumber<int>(item, where, key));
      }
    } else if (key == "tree_strategy") {
      c.plan.tree_strategy = AsConfig(where, [&] { return perturb::ParseTreeStrategy(value); });
    } else if (key == "parser_command") {
      c.plan.parser_command = value;
    } else if (key == "wordlist") {
      c.wordlist = path_of(value);
    } else if (key == "sophistication_cutoff") {
      c.lexical.sophistication_cutoff = ParseNumber<int>(value, where, key);
    } else if (key == "segment_size") {
      c.lexical.segment_size = ParseNumber<int>(value, where, key);
    } else if (key == "random_samples") {
      c.lexical.random_samples = ParseNumber<int>(value, where, key);
    } else if (key == "models") {
      c.models.clear();
      for (const auto& item : SplitList(value)) {
        c.models.push_back(AsConfig(where, [&] { return models::ParseModelKind(item); }));
      }
    } else if (key == "folds") {
      c.folds = ParseNumber<int>(value, where, key);
    } else if (key == "significance") {
      c.significance = ParseReal(value, where, key);
    } else if (key == "aggregation") {
      c.aggregation = AsConfig(where, [&] { return stats::ParseAggregation(value); });
    } else if (key == "aggregation_order") {
      c.aggregation_order = AsConfig(where, [&] { return stats::ParseAggregationOrder(value); });
    } else if (key == "svm_gamma") {
      if (value == "scale") {
        c.svm_gamma.reset();
      } else {
        c.svm_gamma = ParseReal(value, where, key);
      }
    } else if (key == "mlp_batch") {
      c.mlp_batch = ParseNumber<int>(value, where, key);
    } else if (key == "patterns") {
      c.patterns = path_of(value);
    } else if (key == "dlevel_rules") {
      c.dlevel_rules = path_of(value);
    } else if (key == "reference_values") {
      c.reference_values = path_of(value);
    } else if (key == "out") {
      c.out = path_of(value);
    } else if (key == "jobs") {
      c.jobs = ParseNumber<int>(value, where, key);
    }
  }
  if (!seen.count("out")) c.out = base_dir / "out";
  if (!format_set && c.corpus.extension() == ".csv") c.corpus_format = CorpusFormat::kCsv;
  if (c.corpus_name.empty()) c.corpus_name = c.corpus.stem().string();
  if (const char* env = std::getenv("LEXSYN_WORDLIST"); env != nullptr && *env != '\0') {
    c.wordlist = env;
  }
  c.SetSeed(seed);
  return c;
}

PipelineConfig PipelineConfig::Load(const fs::path& file) {
  std::string text;
  try {
    text = ReadFile(file);
  } catch (const Error&) {
    throw Error(ErrorKind::kConfig, "cannot read config file " + file.string());
  }
  return Parse(text, fs::absolute(file).parent_path());
}

void PipelineConfig::SetSeed(uint64_t master) {
  seed = master;
  plan.seed = DeriveSeed(master, "perturb");
  lexical.seed = DeriveSeed(master, "lexical");
}

uint64_t PipelineConfig::FoldSeed() const { return DeriveSeed(seed, "folds"); }

models::ModelSpec PipelineConfig::Spec(models::ModelKind kind) const {
  models::ModelSpec s = models::ModelSpec::Defaults(
      kind, DeriveSeed(seed, std::string("model:") + models::ModelKindName(kind)));
  s.svm_gamma = svm_gamma;
  s.mlp_batch = mlp_batch;
  return s;
}

void PipelineConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kConfig, msg); };
  auto must_exist = [&](const fs::path& p, const std::string& key) {
    if (p.empty()) fail(key + " is not set");
    if (!fs::is_regular_file(p)) fail(key + " file not found: " + p.string());
  };
  if (wordlist.empty()) fail("wordlist is not set (config key wordlist or LEXSYN_WORDLIST)");
  must_exist(wordlist, "wordlist");
  must_exist(corpus, "corpus");
  if (!patterns.empty()) must_exist(patterns, "patterns");
  if (!dlevel_rules.empty()) must_exist(dlevel_rules, "dlevel_rules");
  if (!reference_values.empty()) must_exist(reference_values, "reference_values");
  if (plan.levels.empty()) fail("levels must list at least one alteration level");
  for (int l : plan.levels) {
    if (l < 1 || l > 100) fail("alteration levels must lie in [1, 100]");
  }
  AsConfig("", [&] { plan.Validate(); return 0; });
  AsConfig("", [&] { lexical.Validate(); return 0; });
  if (models.empty()) fail("models must list at least one classifier");
  std::set<models::ModelKind> uniq(models.begin(), models.end());
  if (uniq.size() != models.size()) fail("models lists a classifier twice");
  if (folds < 2) fail("folds must be >= 2");
  if (!(significance > 0.0 && significance < 1.0)) fail("significance must lie in (0, 1)");
  if (svm_gamma && !(*svm_gamma > 0.0)) fail("svm_gamma must be positive");
  if (mlp_batch < 0) fail("mlp_batch must be >= 0");
  if (jobs < 1) fail("jobs must be >= 1");
}

ordered_json PipelineConfig::ToJson() const {
  ordered_json j;
  j["corpus"] = FileName(corpus);
  j["corpus_format"] = corpus_format == CorpusFormat::kCsv ? "csv" : "jsonl";
  j["corpus_name"] = corpus_name;
  j["seed"] = seed;
  j["levels"] = plan.levels;
  j["tree_strategy"] = perturb::TreeStrategyName(plan.tree_strategy);
  j["parser_command"] = plan.parser_command;
  j["wordlist"] = FileName(wordlist);
  j["sophistication_cutoff"] = lexical.sophistication_cutoff;
  j["segment_size"] = lexical.segment_size;
  j["random_samples"] = lexical.random_samples;
  j["patterns"] = FileName(patterns);
  j["dlevel_rules"] = FileName(dlevel_rules);
  std::vector<std::string> names;
  for (auto k : models) names.push_back(models::ModelKindName(k));
  j["models"] = names;
  j["folds"] = folds;
  j["svm_gamma"] = svm_gamma ? ordered_json(*svm_gamma) : ordered_json("scale");
  j["mlp_batch"] = mlp_batch;
  j["significance"] = significance;
  j["aggregation"] = stats::AggregationName(aggregation);
  j["aggregation_order"] = stats::AggregationOrderName(aggregation_order);
  j["reference_values"] = FileName(reference_values);
  return j;
}

// ---------------------------------------------------------------------------
// Stages

const char* StageName(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return "ingest";
    case Stage::kPerturb: return "perturb";
    case Stage::kExtract: return "extract";
    case Stage::kEvaluate: return "evaluate";
    case Stage::kAnalyze: return "analyze";
    case Stage::kReport: return "report";
  }
  return "?";
}

Stage ParseStage(std::string_view name) {
  for (Stage s : {Stage::kIngest, Stage::kPerturb, Stage::kExtract, Stage::kEvaluate,
                  Stage::kAnalyze, Stage::kReport}) {
    if (name == StageName(s)) return s;
  }
  throw Error(ErrorKind::kConfig, "unknown stage '" + std::string(name) + "'");
}

void RunStage(Stage stage, const PipelineConfig& config) {
  Manifest m(config.out);
  try {
    switch (stage) {
      case Stage::kIngest: Ingest(config, &m); break;
      case Stage::kPerturb: Perturb(config, &m); break;
      case Stage::kExtract: Extract(config, &m); break;
      case Stage::kEvaluate: Evaluate(config, &m); break;
      case Stage::kAnalyze: Analyze(config, &m); break;
      case Stage::kReport: Report(config, &m); break;
    }
  } catch (const Error& e) {
    m.Save();
    throw Error(e.kind(), std::string("stage ") + StageName(stage) + ": " + Detail(e));
  } catch (const std::exception& e) {
    m.Save();
    throw Error(ErrorKind::kIo, std::string("stage ") + StageName(stage) + ": " + e.what());
  }
  m.Save();
}

ordered_json RunPipeline(const PipelineConfig& config) {
  config.Validate();
  for (Stage s : {Stage::kIngest, Stage::kPerturb, Stage::kExtract, Stage::kEvaluate,
                  Stage::kAnalyze, Stage::kReport}) {
    RunStage(s, config);
  }
  return ordered_json::parse(ReadFile(config.out / "bundle.json"));
}

const std::vector<std::string>& BundleTableNames() {
  static const std::vector<std::string> kNames{"profile",    "zscores",    "cv_results",
                                               "f1_delta",   "importance", "rank_changes"};
  return kNames;
}

std::vector<fs::path> EmitPlots(const ordered_json& bundle, const fs::path& dir) {
  std::vector<std::string> missing;
  const bool has_tables = bundle.contains("tables") && bundle.at("tables").is_object();
  for (const auto& name : BundleTableNames()) {
    if (!has_tables || !bundle.at("tables").contains(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& n : missing) list += (list.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::kSchema, "incomplete bundle, missing tables: " + list);
  }
  const auto& t = bundle.at("tables");
  std::vector<std::pair<std::string, std::string>> files{
      {"zscores.svg", ZscorePlot(t.at("zscores"))},
      {"importance.svg", ImportancePlot(t.at("importance"))},
      {"rank_heatmap.svg", HeatmapPlot(t.at("rank_changes"))},
  };
  std::vector<fs::path> written;
  for (const auto& [name, content] : files) {
    WriteFile(dir / name, content);
    written.push_back(dir / name);
  }
  return written;
}

std::string FileSha256(const fs::path& path) { return Sha256Hex(ReadFile(path)); }

}  // namespace lexsyn::pipeline
