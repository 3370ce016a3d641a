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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lexsyn/common.h"
#include "lexsyn/corpus.h"
#include "lexsyn/synth.h"
#include "test_util.h"

namespace lexsyn::pipeline {
namespace {

namespace fs = std::filesystem;
using lexsyn::testing::DataPath;
using lexsyn::testing::ReadText;
using lexsyn::testing::TempDir;

// Writes a 40-document corpus and a config next to it.
fs::path SmallSetup(const std::string& name, const std::string& extra = "") {
  const fs::path dir = TempDir(name);
  synth::CorpusOptions o;
  o.documents = 40;
  o.seed = 5;
  std::ofstream(dir / "corpus.jsonl") << SerializeCorpus(synth::MakeTwoStyleCorpus(o));
  std::ofstream(dir / "exp.conf") << "# small experiment\n"
                                  << "corpus = corpus.jsonl\n"
                                  << "wordlist = " << DataPath("wordlist_en.txt").string() << "\n"
                                  << "seed = 3\n"
                                  << "models = gnb, rf\n"
                                  << "folds = 5\n"
                                  << extra;
  return dir;
}

PipelineConfig Config(const fs::path& dir, const std::string& out = "out") {
  PipelineConfig c = PipelineConfig::Load(dir / "exp.conf");
  c.out = dir / out;
  return c;
}

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

// Minimal XML well-formedness: balanced, properly nested tags with quoted
// attributes.
bool WellFormedXml(const std::string& text) {
  std::vector<std::string> stack;
  size_t i = 0;
  bool root_seen = false;
  while ((i = text.find('<', i)) != std::string::npos) {
    const size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    if (self_closing) tag.pop_back();
    size_t quotes = 0;
    for (char c : tag) quotes += c == '"';
    if (quotes % 2) return false;
    const std::string name = tag.substr(0, tag.find_first_of(" \t\n"));
    if (stack.empty()) {
      if (root_seen) return false;
      root_seen = true;
    }
    if (!self_closing) stack.push_back(name);
  }
  return root_seen && stack.empty();
}

int RunCli(const std::string& args) {
  const std::string cmd = std::string(LEXSYN_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(ConfigTest, ParsesKeysAndResolvesPaths) {
  const PipelineConfig c = PipelineConfig::Parse(
      "# comment\ncorpus = data/c.csv\nseed = 11\nlevels = 20, 60\nmodels = svm\n"
      "svm_gamma = 0.5\naggregation = absolute\n",
      "/base");
  EXPECT_EQ(c.corpus, fs::path("/base/data/c.csv"));
  EXPECT_EQ(c.corpus_format, CorpusFormat::kCsv);
  EXPECT_EQ(c.corpus_name, "c");
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.plan.levels, (std::vector<int>{20, 60}));
  EXPECT_EQ(c.models, (std::vector<models::ModelKind>{models::ModelKind::kSvm}));
  EXPECT_EQ(c.svm_gamma, 0.5);
  EXPECT_EQ(c.aggregation, stats::Aggregation::kAbsolute);
  EXPECT_EQ(c.out, fs::path("/base/out"));
  EXPECT_NE(c.plan.seed, c.lexical.seed);
}

TEST(ConfigTest, RejectsUnknownDuplicateAndMalformed) {
  for (const char* bad : {"colour = red\n", "seed = 1\nseed = 2\n", "seed = x\n", "folds\n",
                          "models = knn\n", "levels = 20, abc\n"}) {
    EXPECT_EQ(KindOf([&] { PipelineConfig::Parse(bad, "/"); }), ErrorKind::kConfig) << bad;
  }
}

TEST(ConfigTest, ValidationCatchesRangesAndMissingFiles) {
  const fs::path dir = SmallSetup("validate");
  PipelineConfig c = Config(dir);
  EXPECT_NO_THROW(c.Validate());
  PipelineConfig bad = c;
  bad.plan.levels = {60, 20};
  EXPECT_EQ(KindOf([&] { bad.Validate(); }), ErrorKind::kConfig);
  bad = c;
  bad.folds = 1;
  EXPECT_EQ(KindOf([&] { bad.Validate(); }), ErrorKind::kConfig);
  bad = c;
  bad.significance = 1.5;
  EXPECT_EQ(KindOf([&] { bad.Validate(); }), ErrorKind::kConfig);
  bad = c;
  bad.corpus = dir / "absent.jsonl";
  EXPECT_EQ(KindOf([&] { bad.Validate(); }), ErrorKind::kConfig);
}

TEST(PipelineTest, MissingWordlistFailsBeforeAnyOutput) {
  const fs::path dir = SmallSetup("no_wordlist");
  PipelineConfig c = Config(dir);
  c.wordlist = dir / "missing.txt";
  try {
    RunPipeline(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("wordlist"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(c.out));
}

TEST(PipelineTest, RunProducesEveryTableAndIsDeterministic) {
  const fs::path dir = SmallSetup("determinism");
  PipelineConfig a = Config(dir, "a");
  a.jobs = 1;
  PipelineConfig b = Config(dir, "b");
  b.jobs = 4;
  const auto bundle = RunPipeline(a);
  RunPipeline(b);
  for (const auto& name : BundleTableNames()) EXPECT_TRUE(bundle["tables"].contains(name)) << name;
  EXPECT_EQ(FileSha256(a.out / "bundle.json"), FileSha256(b.out / "bundle.json"));
  for (const char* f : {"profile.csv", "zscores.csv", "cv.csv", "f1_delta.csv", "importance.csv",
                        "rank_changes.csv", "features/features_L0.csv", "features/features_L80.csv",
                        "levels/corpus_L40.jsonl", "manifest.json", "plots/zscores.svg"}) {
    EXPECT_TRUE(fs::exists(a.out / f)) << f;
  }

  PipelineConfig other = Config(dir, "c");
  other.SetSeed(4);
  RunPipeline(other);
  EXPECT_NE(FileSha256(a.out / "bundle.json"), FileSha256(other.out / "bundle.json"));
}

TEST(PipelineTest, StageChainEqualsRun) {
  const fs::path dir = SmallSetup("chain");
  const PipelineConfig staged = Config(dir, "staged");
  for (Stage s : {Stage::kIngest, Stage::kPerturb, Stage::kExtract, Stage::kEvaluate,
                  Stage::kAnalyze, Stage::kReport}) {
    RunStage(s, staged);
  }
  const PipelineConfig whole = Config(dir, "whole");
  RunPipeline(whole);
  EXPECT_EQ(ReadText(staged.out / "bundle.json"), ReadText(whole.out / "bundle.json"));
  EXPECT_TRUE(fs::exists(staged.out / "features/features_L20.csv"));
}

TEST(PipelineTest, StaleAndMissingInputsAreDetected) {
  const fs::path dir = SmallSetup("stale");
  const PipelineConfig c = Config(dir);
  RunStage(Stage::kIngest, c);
  RunStage(Stage::kPerturb, c);
  RunStage(Stage::kExtract, c);
  EXPECT_EQ(KindOf([&] { RunStage(Stage::kAnalyze, c); }), ErrorKind::kStale);

  RunStage(Stage::kEvaluate, c);
  RunStage(Stage::kAnalyze, c);
  std::ofstream(c.out / "features/features_L40.csv", std::ios::app) << "\n";
  EXPECT_EQ(KindOf([&] { RunStage(Stage::kEvaluate, c); }), ErrorKind::kStale);

  // Rebuilding extract makes evaluate consistent again.
  RunStage(Stage::kExtract, c);
  EXPECT_NO_THROW(RunStage(Stage::kEvaluate, c));

  PipelineConfig reseeded = c;
  reseeded.SetSeed(99);
  EXPECT_EQ(KindOf([&] { RunStage(Stage::kExtract, reseeded); }), ErrorKind::kStale);
}

TEST(PipelineTest, DemoConfigCompletes) {
  PipelineConfig c = PipelineConfig::Load(DataPath("demo.conf"));
  c.out = TempDir("demo") / "out";
  const auto bundle = RunPipeline(c);
  for (const auto& name : BundleTableNames()) EXPECT_TRUE(bundle["tables"].contains(name)) << name;
  EXPECT_TRUE(bundle.contains("reference_annotations"));
  EXPECT_EQ(bundle["tables"]["zscores"]["rows"].size(), 5u);
  EXPECT_EQ(bundle["tables"]["cv_results"]["rows"].size(), 20u);
  for (const char* svg : {"zscores.svg", "importance.svg", "rank_heatmap.svg"}) {
    EXPECT_TRUE(WellFormedXml(ReadText(c.out / "plots" / svg))) << svg;
  }
}

TEST(EmitPlotsTest, SingleLevelLineHasTwoPoints) {
  const fs::path dir = SmallSetup("single_level", "levels = 40\n");
  const PipelineConfig c = Config(dir);
  const auto bundle = RunPipeline(c);
  const auto written = EmitPlots(bundle, dir / "plots");
  ASSERT_EQ(written.size(), 3u);
  const std::string svg = ReadText(dir / "plots/zscores.svg");
  EXPECT_TRUE(WellFormedXml(svg));
  const size_t start = svg.find("<polyline points=\"") + 18;
  const std::string points = svg.substr(start, svg.find('"', start) - start);
  std::istringstream ss(points);
  std::string p;
  int n = 0;
  while (ss >> p) ++n;
  EXPECT_EQ(n, 2);
}

TEST(EmitPlotsTest, IncompleteBundleListsMissingTables) {
  nlohmann::ordered_json bundle;
  bundle["tables"]["profile"] = nlohmann::ordered_json::object();
  try {
    EmitPlots(bundle, TempDir("incomplete"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("zscores"), std::string::npos) << msg;
    EXPECT_NE(msg.find("rank_changes"), std::string::npos) << msg;
  }
}

TEST(CliTest, ExitCodes) {
  const fs::path dir = SmallSetup("cli");
  const std::string conf = "--config " + (dir / "exp.conf").string();
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(RunCli("ingest " + conf + out), 0);
  EXPECT_EQ(RunCli("analyze " + conf + out), 3);
  EXPECT_EQ(RunCli("run " + conf + out + " --models gnb --levels 30,60 --jobs 2"), 0);
  EXPECT_TRUE(fs::exists(dir / "out/features/features_L30.csv"));
  EXPECT_EQ(RunCli("run " + conf + out + " --models knn"), 1);
  EXPECT_EQ(RunCli("run " + conf + out + " --levels 60,20"), 1);
  EXPECT_EQ(RunCli("run"), 1);
  EXPECT_EQ(RunCli("frobnicate"), 1);

  std::ofstream(dir / "broken.jsonl") << "{not json\n";
  std::ofstream(dir / "broken.conf") << "corpus = broken.jsonl\nwordlist = "
                                     << DataPath("wordlist_en.txt").string() << "\n";
  EXPECT_EQ(RunCli("ingest --config " + (dir / "broken.conf").string()), 2);
}

TEST(CliTest, WordlistEnvironmentOverride) {
  const fs::path dir = SmallSetup("env");
  std::ofstream(dir / "nowl.conf") << "corpus = corpus.jsonl\nmodels = gnb\nfolds = 5\n";
  const std::string args = "ingest --config " + (dir / "nowl.conf").string();
  EXPECT_EQ(RunCli(args), 1);
  setenv("LEXSYN_WORDLIST", DataPath("wordlist_en.txt").c_str(), 1);
  const int code = RunCli(args);
  unsetenv("LEXSYN_WORDLIST");
  EXPECT_EQ(code, 0);
}

}  // namespace
}  // namespace lexsyn::pipeline
