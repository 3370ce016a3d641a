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

#include "lexsyn/lexfeat.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace lexsyn::lexfeat {
namespace {

constexpr char kJoin = '\x1f';

// n-gram -> count, plus the number of n-grams. Keys join tokens with an
// ASCII unit separator; the context of a key is everything before the last
// separator.
struct NgramCounts {
  std::map<std::string, int> counts;
  long total = 0;
};

NgramCounts CountNgrams(const Sentences& sentences, int n) {
  NgramCounts out;
  for (const auto& s : sentences) {
    if (static_cast<int>(s.size()) < n) continue;
    for (size_t i = 0; i + n <= s.size(); ++i) {
      std::string key = s[i];
      for (int j = 1; j < n; ++j) {
        key.push_back(kJoin);
        key += s[i + j];
      }
      ++out.counts[key];
      ++out.total;
    }
  }
  return out;
}

std::string ContextOf(const std::string& key) {
  auto p = key.rfind(kJoin);
  return p == std::string::npos ? std::string() : key.substr(0, p);
}

std::string Lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool HasPrefix(const std::string& pos, const std::vector<std::string>& prefixes) {
  for (const auto& p : prefixes)
    if (pos.compare(0, p.size(), p) == 0) return true;
  return false;
}

Value Ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

NgramStats ComputeNgramStats(const Sentences& sentences, int n) {
  const auto c = CountNgrams(sentences, n);
  NgramStats s;
  s.distinct = static_cast<int>(c.counts.size());
  for (const auto& [k, v] : c.counts)
    if (v == 1) ++s.once;
  if (s.distinct > 0) s.once_ratio = static_cast<double>(s.once) / s.distinct;
  return s;
}

Value ShannonEntropy(const Sentences& sentences, int n) {
  const auto c = CountNgrams(sentences, n);
  if (c.total == 0) return std::nullopt;
  const double len = static_cast<double>(c.total);
  double h = 0.0;
  for (const auto& [k, v] : c.counts) {
    const double p = v / len;
    h -= p * std::log2(p);
  }
  return std::max(0.0, h);
}

Value ConditionalEntropy(const Sentences& sentences, int n) {
  if (n < 2) {
    throw Error(ErrorKind::kRange, "conditional entropy needs n >= 2");
  }
  const auto c = CountNgrams(sentences, n);
  if (c.total == 0) return std::nullopt;
  std::map<std::string, int> context;
  for (const auto& [k, v] : c.counts) context[ContextOf(k)] += v;
  const double len = static_cast<double>(c.total);
  double h = 0.0;
  for (const auto& [k, v] : c.counts) {
    h -= (v / len) * std::log2(static_cast<double>(v) / context[ContextOf(k)]);
  }
  return std::max(0.0, h);
}

Wordlist Wordlist::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open wordlist " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    words.push_back(Lower(line.substr(b, e - b + 1)));
  }
  if (words.empty()) throw Error(ErrorKind::kConfig, "wordlist " + path.string() + " is empty");
  return FromWords(words);
}

Wordlist Wordlist::FromWords(const std::vector<std::string>& ranked) {
  Wordlist w;
  int rank = 0;
  for (const auto& word : ranked) {
    ++rank;
    w.rank_.emplace(Lower(word), rank);  // first occurrence wins
  }
  return w;
}

int Wordlist::Rank(const std::string& word) const {
  auto it = rank_.find(word);
  return it == rank_.end() ? 0 : it->second;
}

void LexicalConfig::Validate() const {
  if (sophistication_cutoff < 1) throw Error(ErrorKind::kConfig, "sophistication_cutoff must be >= 1");
  if (segment_size < 1) throw Error(ErrorKind::kConfig, "segment_size must be >= 1");
  if (random_samples < 1) throw Error(ErrorKind::kConfig, "random_samples must be >= 1");
  if (lexical_tagset.empty() || verb_tagset.empty()) {
    throw Error(ErrorKind::kConfig, "lexical and verb tagsets must be non-empty");
  }
}

FeatureVector LcaFeatures(const std::vector<Token>& tokens,
                          const LexicalConfig& config,
                          const Wordlist& wordlist) {
  const std::set<std::string> aux(config.auxiliaries.begin(), config.auxiliaries.end());
  std::vector<std::string> words;
  std::set<std::string> types, stypes, lex_types, slex_types, sverb_types;
  long swordtokens = 0, lextokens = 0, slextokens = 0, verbtokens = 0;
  for (const auto& t : tokens) {
    if (!IsWordForm(t.form)) continue;
    if (t.pos.empty()) {
      throw Error(ErrorKind::kTaggingRequired, "token '" + t.form + "' has no POS tag");
    }
    const std::string form = Lower(t.form);
    words.push_back(form);
    types.insert(form);
    // Fillers (&uh) and clitic fragments ('s) are never sophisticated.
    const int rank = wordlist.Rank(form);
    const bool sophisticated = form[0] != '&' && form[0] != '\'' &&
                               t.pos != "CD" &&
                               (rank == 0 || rank > config.sophistication_cutoff);
    const bool auxiliary = aux.count(form) > 0;
    const bool verb = HasPrefix(t.pos, config.verb_tagset) && !auxiliary;
    const bool lexical = HasPrefix(t.pos, config.lexical_tagset) &&
                         !(HasPrefix(t.pos, config.verb_tagset) && auxiliary);
    if (sophisticated) {
      ++swordtokens;
      stypes.insert(form);
    }
    if (lexical) {
      ++lextokens;
      lex_types.insert(form);
      if (sophisticated) {
        ++slextokens;
        slex_types.insert(form);
      }
    }
    if (verb) {
      ++verbtokens;
      if (sophisticated) sverb_types.insert(form);
    }
  }
  const double n = static_cast<double>(words.size());
  const double t = static_cast<double>(types.size());
  const double sv = static_cast<double>(sverb_types.size());
  const size_t seg = static_cast<size_t>(config.segment_size);

  auto distinct = [](auto begin, auto end) {
    return static_cast<double>(std::set<std::string>(begin, end).size());
  };

  Value ndwz, ndwerz, ndwesz, msttr;
  if (!words.empty()) {
    if (words.size() <= seg) {
      ndwz = ndwerz = ndwesz = t;
    } else {
      ndwz = distinct(words.begin(), words.begin() + seg);
      Rng random_rng(DeriveSeed(config.seed, "ndwerz"));
      Rng seq_rng(DeriveSeed(config.seed, "ndwesz"));
      double sum_r = 0.0, sum_s = 0.0;
      std::vector<size_t> idx(words.size());
      for (int s = 0; s < config.random_samples; ++s) {
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        // Partial Fisher-Yates: the first `seg` slots are a uniform sample.
        std::set<std::string> sample;
        for (size_t i = 0; i < seg; ++i) {
          size_t j = i + random_rng.UniformIndex(idx.size() - i);
          std::swap(idx[i], idx[j]);
          sample.insert(words[idx[i]]);
        }
        sum_r += static_cast<double>(sample.size());
        size_t start = seq_rng.UniformIndex(words.size() - seg + 1);
        sum_s += distinct(words.begin() + start, words.begin() + start + seg);
      }
      ndwerz = sum_r / config.random_samples;
      ndwesz = sum_s / config.random_samples;
    }
    if (words.size() < seg) {
      msttr = t / n;
    } else {
      const size_t segments = words.size() / seg;
      double sum = 0.0;
      for (size_t s = 0; s < segments; ++s) {
        sum += distinct(words.begin() + s * seg, words.begin() + (s + 1) * seg) / seg;
      }
      msttr = sum / segments;
    }
  }

  Value logttr, uber;
  if (n > 1) {
    logttr = std::log(t) / std::log(n);
    if (t != n) {
      const double ln = std::log(n);
      uber = ln * ln / (ln - std::log(t));
    }
  }

  const auto L = FeatureGroup::kLexical;
  FeatureVector v;
  v.Add("wordtypes", L, t);
  v.Add("swordtypes", L, static_cast<double>(stypes.size()));
  v.Add("lextypes", L, static_cast<double>(lex_types.size()));
  v.Add("slextypes", L, static_cast<double>(slex_types.size()));
  v.Add("wordtokens", L, n);
  v.Add("swordtokens", L, static_cast<double>(swordtokens));
  v.Add("lextokens", L, static_cast<double>(lextokens));
  v.Add("slextokens", L, static_cast<double>(slextokens));
  v.Add("ld", L, Ratio(lextokens, n));
  v.Add("ls1", L, Ratio(slextokens, lextokens));
  v.Add("ls2", L, Ratio(stypes.size(), t));
  v.Add("vs1", L, Ratio(sv, verbtokens));
  v.Add("vs2", L, Ratio(sv * sv, verbtokens));
  v.Add("cvs1", L, Ratio(sv, std::sqrt(2.0 * verbtokens)));
  v.Add("ndw", L, t);
  v.Add("ndwz", L, words.empty() ? Value(0.0) : ndwz);
  v.Add("ndwerz", L, ndwerz);
  v.Add("ndwesz", L, ndwesz);
  v.Add("ttr", L, Ratio(t, n));
  v.Add("msttr", L, msttr);
  v.Add("cttr", L, Ratio(t, std::sqrt(2.0 * n)));
  v.Add("rttr", L, Ratio(t, std::sqrt(n)));
  v.Add("logttr", L, logttr);
  v.Add("uber", L, uber);
  return v;
}

FeatureVector ExtractLexical(const Document& doc, const LexicalConfig& config,
                             const Wordlist& wordlist) {
  const Sentences sentences = doc.SentenceForms();
  const auto L = FeatureGroup::kLexical;
  FeatureVector v;
  const auto uni = ComputeNgramStats(sentences, 1);
  const auto bi = ComputeNgramStats(sentences, 2);
  const auto tri = ComputeNgramStats(sentences, 3);
  v.Add("distinct_tokens", L, static_cast<double>(uni.distinct));
  v.Add("distinct_tokens_ratio", L, uni.once_ratio);
  v.Add("bigrams", L, static_cast<double>(bi.distinct));
  v.Add("distinct_bigrams", L, static_cast<double>(bi.once));
  v.Add("distinct_bigrams_ratio", L, bi.once_ratio);
  v.Add("trigrams", L, static_cast<double>(tri.distinct));
  v.Add("distinct_trigrams", L, static_cast<double>(tri.once));
  v.Add("distinct_trigrams_ratio", L, tri.once_ratio);
  v.Add("entropy_1gram", L, ShannonEntropy(sentences, 1));
  v.Add("entropy_2gram", L, ShannonEntropy(sentences, 2));
  v.Add("entropy_3gram", L, ShannonEntropy(sentences, 3));
  v.Add("cond_entropy_2gram", L, ConditionalEntropy(sentences, 2));
  v.Add("cond_entropy_3gram", L, ConditionalEntropy(sentences, 3));
  v.Append(LcaFeatures(doc.tokens, config, wordlist));
  return v;
}

const std::vector<std::string>& LexicalFeatureNames() {
  static const std::vector<std::string> kNames{
      "distinct_tokens", "distinct_tokens_ratio", "bigrams", "distinct_bigrams",
      "distinct_bigrams_ratio", "trigrams", "distinct_trigrams",
      "distinct_trigrams_ratio", "entropy_1gram", "entropy_2gram",
      "entropy_3gram", "cond_entropy_2gram", "cond_entropy_3gram", "wordtypes",
      "swordtypes", "lextypes", "slextypes", "wordtokens", "swordtokens",
      "lextokens", "slextokens", "ld", "ls1", "ls2", "vs1", "vs2", "cvs1",
      "ndw", "ndwz", "ndwerz", "ndwesz", "ttr", "msttr", "cttr", "rttr",
      "logttr", "uber"};
  return kNames;
}

Value MeanWordLength(const Document& doc) {
  double chars = 0.0, words = 0.0;
  for (const auto& t : doc.tokens) {
    if (!IsWordForm(t.form)) continue;
    chars += static_cast<double>(t.form.size());
    words += 1.0;
  }
  return Ratio(chars, words);
}

}  // namespace lexsyn::lexfeat
