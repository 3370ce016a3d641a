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


// Shared helpers for the unit tests.

#ifndef LEXSYN_TESTS_TEST_UTIL_H_
#define LEXSYN_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lexsyn/common.h"
#include "lexsyn/corpus.h"
#include "lexsyn/treepat.h"

namespace lexsyn::testing {

inline std::filesystem::path DataPath(std::string_view name) {
  return std::filesystem::path(LEXSYN_DATA_DIR) / name;
}

inline std::filesystem::path FixturePath(std::string_view name) {
  return std::filesystem::path(LEXSYN_FIXTURE_DIR) / name;
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Non-empty, non-comment lines.
inline std::vector<std::string> ReadLines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

// Splits on single spaces into sentences of one.
inline std::vector<std::vector<std::string>> Words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream ss{std::string(text)};
  std::string w;
  while (ss >> w) out.push_back(w);
  return {out};
}

// A document whose tokens and trees come from bracketed sentences.
inline Document DocumentFromTrees(const std::string& id, const std::string& label,
                                  const std::vector<std::string>& trees) {
  Document doc;
  doc.id = id;
  doc.subject_id = id;
  doc.label = label;
  for (const auto& t : trees) {
    const treepat::Tree tree = treepat::ParsePtb(t);
    const auto leaves = tree.Leaves();
    const auto tags = tree.Tags();
    for (size_t i = 0; i < leaves.size(); ++i) doc.tokens.push_back({leaves[i], tags[i]});
    doc.trees.push_back(t);
  }
  ValidateDocument(&doc, id);
  return doc;
}

// A fresh empty directory under the system temp dir.
inline std::filesystem::path TempDir(std::string_view name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("lexsyn_test_" + std::string(name));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lexsyn::testing

#endif  // LEXSYN_TESTS_TEST_UTIL_H_
