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

// Syntactic complexity: production-unit counts, the 14 unit ratios and
// sentence developmental levels, all driven by versioned pattern files.

#ifndef LEXSYN_SYNFEAT_H_
#define LEXSYN_SYNFEAT_H_

#include <string>
#include <string_view>
#include <vector>

#include "lexsyn/corpus.h"
#include "lexsyn/features.h"
#include "lexsyn/treepat.h"

namespace lexsyn::synfeat {

struct ProductionCounts {
  int S = 0;
  int VP = 0;
  int C = 0;
  int T = 0;
  int DC = 0;
  int CT = 0;
  int CP = 0;
  int CN = 0;

  ProductionCounts& operator+=(const ProductionCounts& o);
  bool operator==(const ProductionCounts&) const = default;
};

struct DLevelRule {
  int level = 0;
  bool embed = false;
  std::string name;
  treepat::Pattern pattern;
};

struct DLevelRules {
  std::string version;
  int multi_level = 7;
  int multi_threshold = 2;
  std::vector<DLevelRule> rules;

  static DLevelRules Parse(std::string_view text);
};

// Pattern file and rule table. Default() returns the versions compiled into
// the library from data/patterns/.
struct SyntaxResources {
  treepat::PatternFile units;
  DLevelRules dlevel;

  static const SyntaxResources& Default();
  static SyntaxResources FromText(std::string_view units_text,
                                  std::string_view dlevel_text);
  std::string Version() const;
};

// Wraps a sentence tree in ROOT unless it already is one; an unlabeled
// outer bracket is relabeled ROOT.
treepat::Tree WithRoot(treepat::Tree tree);

ProductionCounts CountProductionUnits(
    const std::vector<treepat::Tree>& trees,
    const SyntaxResources& res = SyntaxResources::Default());

// MLS, MLT, MLC, C/S, VP/T, C/T, DC/C, DC/T, T/S, CT/T, CP/T, CP/C, CN/T,
// CN/C. Zero denominators give absent values.
FeatureVector SyntacticRatios(const ProductionCounts& counts, long word_count);

struct DLevel {
  int level = 0;
  bool flagged = false;  // no clause-level node: classified 0 by default
  std::string rule;      // name of the deciding rule, empty for level 0
};

DLevel DLevelClassify(const treepat::Tree& tree,
                      const SyntaxResources& res = SyntaxResources::Default());

struct DLevelShares {
  Value p0;
  Value p1_4;
  Value p5_7;
};

DLevelShares DLevelDistribution(
    const std::vector<treepat::Tree>& trees,
    const SyntaxResources& res = SyntaxResources::Default());

// 8 counts, 14 ratios and 3 developmental-level shares. Throws
// Error(kTreesRequired) naming the document when it has no trees.
FeatureVector ExtractSyntactic(
    const Document& doc,
    const SyntaxResources& res = SyntaxResources::Default());

const std::vector<std::string>& SyntacticFeatureNames();

}  // namespace lexsyn::synfeat

#endif  // LEXSYN_SYNFEAT_H_
