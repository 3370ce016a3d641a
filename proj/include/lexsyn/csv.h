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

// Minimal RFC 4180 reading and writing.

#ifndef LEXSYN_CSV_H_
#define LEXSYN_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace lexsyn {

using CsvRecord = std::vector<std::string>;

// Parses quoted fields, doubled quotes and embedded newlines. Throws
// Error(kParse) naming the line of an unterminated quote.
std::vector<CsvRecord> ParseCsv(std::string_view text);

class CsvWriter {
 public:
  void Row(const std::vector<std::string>& cells);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

}  // namespace lexsyn

#endif  // LEXSYN_CSV_H_
