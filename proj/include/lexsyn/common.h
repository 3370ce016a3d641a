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

#ifndef LEXSYN_COMMON_H_
#define LEXSYN_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lexsyn {

// A feature value that may be undefined (zero denominator, too-short text).
using Value = std::optional<double>;

enum class ErrorKind {
  kParse,
  kSchema,
  kAlignment,
  kRange,
  kConfig,
  kExternalTool,
  kTaggingRequired,
  kTreesRequired,
  kDegenerate,
  kDimension,
  kMismatch,
  kStale,
  kIo,
};

const char* ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception type; `kind`
// lets callers (and the CLI exit-code mapping) distinguish categories.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + " error: " +
                           message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// 64-bit FNV-1a. Stable across platforms, used for seed derivation only.
uint64_t Fnv1a64(std::string_view data, uint64_t basis = 0xcbf29ce484222325ULL);

// Mixes a master seed with string/integer components into a child seed.
uint64_t DeriveSeed(uint64_t seed, std::string_view tag, int64_t index = 0);

// Deterministic generator with portable sampling helpers. The standard
// distributions are implementation-defined, so bounded integers and unit
// doubles are produced here from the raw mt19937_64 stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform integer in [0, n). n must be > 0.
  uint64_t UniformIndex(uint64_t n);
  // Uniform double in [0, 1).
  double Uniform01();
  // Standard normal via Box-Muller.
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformIndex(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be written
// to preallocated slots so ordering never affects output.
void ParallelFor(size_t n, int jobs, const std::function<void(size_t)>& fn);

// Hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view data);

// Shortest round-trippable decimal rendering used in every emitted table.
std::string FormatDouble(double value);
std::string FormatValue(const Value& value);

// Writes a diagnostic line to stderr.
void Warn(const std::string& message);

}  // namespace lexsyn

#endif  // LEXSYN_COMMON_H_
