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

// Command-line driver. Exit codes: 0 success, 1 invalid configuration or
// arguments, 2 runtime failure, 3 stale upstream artifact.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lexsyn/common.h"
#include "lexsyn/corpus.h"
#include "lexsyn/pipeline.h"
#include "lexsyn/synth.h"

namespace {

using lexsyn::Error;
using lexsyn::ErrorKind;
namespace pl = lexsyn::pipeline;

struct Overrides {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
  std::vector<int> levels;
  std::vector<std::string> models;
};

void AddCommonOptions(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--config", o->config, "Configuration file")->required();
  cmd->add_option("--seed", o->seed, "Master seed");
  cmd->add_option("--jobs", o->jobs, "Worker threads (outputs do not depend on it)");
  cmd->add_option("--out", o->out, "Output directory");
  cmd->add_option("--levels", o->levels, "Alteration levels, comma separated")->delimiter(',');
  cmd->add_option("--models", o->models, "Classifiers (gnb,rf,svm,mlp), comma separated")
      ->delimiter(',');
}

pl::PipelineConfig BuildConfig(const Overrides& o) {
  pl::PipelineConfig c = pl::PipelineConfig::Load(o.config);
  if (o.seed) c.SetSeed(*o.seed);
  if (o.jobs) c.jobs = *o.jobs;
  if (!o.out.empty()) c.out = o.out;
  if (!o.levels.empty()) c.plan.levels = o.levels;
  if (!o.models.empty()) {
    c.models.clear();
    for (const auto& m : o.models) c.models.push_back(lexsyn::models::ParseModelKind(m));
  }
  c.Validate();
  return c;
}

int ExitCode(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kConfig: return 1;
    case ErrorKind::kStale: return 3;
    default: return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexical and syntactic feature robustness under word deletion"};
  app.require_subcommand(1);

  Overrides o;
  struct StageCmd {
    pl::Stage stage;
    CLI::App* cmd;
  };
  std::vector<StageCmd> stages;
  const std::vector<std::pair<pl::Stage, const char*>> kStages{
      {pl::Stage::kIngest, "Load and validate the corpus"},
      {pl::Stage::kPerturb, "Write word-deleted corpora per level"},
      {pl::Stage::kExtract, "Compute feature tables per level"},
      {pl::Stage::kEvaluate, "Cross-validate the classifiers per level"},
      {pl::Stage::kAnalyze, "Z-scores, F1 deltas, importance fit and ranks"},
      {pl::Stage::kReport, "Assemble the report bundle and plots"},
  };
  for (const auto& [stage, help] : kStages) {
    CLI::App* cmd = app.add_subcommand(pl::StageName(stage), help);
    AddCommonOptions(cmd, &o);
    stages.push_back({stage, cmd});
  }
  CLI::App* run = app.add_subcommand("run", "Run every stage in order");
  AddCommonOptions(run, &o);

  lexsyn::synth::CorpusOptions synth_opts;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic two-style corpus (jsonl)");
  synth->add_option("--out", synth_out, "Output file")->required();
  synth->add_option("--documents", synth_opts.documents, "Number of documents");
  synth->add_option("--seed", synth_opts.seed, "Generator seed");
  synth->add_option("--name", synth_opts.name, "Corpus name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      const lexsyn::Corpus c = lexsyn::synth::MakeTwoStyleCorpus(synth_opts);
      std::ofstream out(synth_out, std::ios::binary);
      if (!out) throw Error(ErrorKind::kIo, "cannot write " + synth_out);
      out << lexsyn::SerializeCorpus(c);
      std::printf("wrote %zu documents to %s\n", c.documents.size(), synth_out.c_str());
      return 0;
    }
    const pl::PipelineConfig config = BuildConfig(o);
    if (run->parsed()) {
      const auto bundle = pl::RunPipeline(config);
      std::printf("run %s complete: %s\n", bundle["run"]["run_id"].get<std::string>().c_str(),
                  (config.out / "bundle.json").string().c_str());
      return 0;
    }
    for (const auto& s : stages) {
      if (s.cmd->parsed()) {
        pl::RunStage(s.stage, config);
        std::printf("%s complete: %s\n", pl::StageName(s.stage), config.out.string().c_str());
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "lexsyn: %s\n", e.what());
    return ExitCode(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lexsyn: %s\n", e.what());
    return 2;
  }
  return 0;
}
