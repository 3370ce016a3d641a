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

#include "lexsyn/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include "lexsyn/treepat.h"

namespace lexsyn::synth {

using treepat::Tree;

namespace {

struct Verb {
  const char* base;
  const char* past;
};

struct Lexicon {
  std::vector<const char*> nouns;
  std::vector<const char*> adjectives;
  std::vector<Verb> transitive;
  std::vector<Verb> intransitive;
  std::vector<const char*> prepositions;
};

const Lexicon& PlainLexicon() {
  static const Lexicon kLex{
      {"man", "boy", "girl", "dog", "cat", "car", "house", "ball"},
      {"big", "good", "old", "new"},
      {{"see", "saw"}, {"take", "took"}, {"get", "got"}, {"like", "liked"}},
      {{"go", "went"}, {"come", "came"}, {"run", "ran"}},
      {"in", "on", "to"},
  };
  return kLex;
}

const Lexicon& VariedLexicon() {
  static const Lexicon kLex{
      {"heron",    "lantern",  "orchard",  "cellist",  "gardener", "violin",
       "harbor",   "meadow",   "scholar",  "carriage", "tapestry", "falcon",
       "merchant", "chapel",   "pilgrim",  "vineyard", "compass",  "glacier",
       "archive",  "sculptor", "quarry",   "lighthouse", "monastery", "saddle",
       "blacksmith", "parchment", "tavern", "orchid",   "courier",  "lagoon"},
      {"amber", "solemn", "weathered", "luminous", "brisk", "fragrant", "somber",
       "rustic", "nimble", "gilded", "crimson", "tranquil"},
      {{"admire", "admired"}, {"polish", "polished"}, {"examine", "examined"},
       {"carve", "carved"}, {"gather", "gathered"}, {"inspect", "inspected"},
       {"repair", "repaired"}, {"sketch", "sketched"}, {"deliver", "delivered"},
       {"borrow", "borrowed"}, {"decorate", "decorated"}, {"salvage", "salvaged"}},
      {{"wander", "wandered"}, {"linger", "lingered"}, {"vanish", "vanished"},
       {"hesitate", "hesitated"}, {"tremble", "trembled"}, {"flourish", "flourished"},
       {"stumble", "stumbled"}},
      {"beside", "beyond", "beneath", "toward", "across", "near"},
  };
  return kLex;
}

Tree Leaf(const char* tag, const std::string& form) {
  Tree t;
  t.label = tag;
  t.form = form;
  return t;
}

Tree Node(const char* label, std::vector<Tree> children) {
  Tree t;
  t.label = label;
  t.children = std::move(children);
  return t;
}

// Structural habits of one subject. Both classes draw styles from the same
// distribution, so clause structure does not separate them.
struct Style {
  std::vector<double> template_weights;  // cumulative, 8 templates
  double adjective_rate = 0.3;
  double pp_rate = 0.2;
  // Chance that a content word comes from the varied lexicon. The classes
  // draw this from disjoint ranges, which is what separates them.
  double rare_rate = 0.0;
};

Style DrawStyle(bool varied, Rng* rng) {
  Style s;
  double total = 0.0;
  for (int t = 0; t < 8; ++t) {
    const double g = rng->Normal();
    total += 0.5 * g * g;  // Gamma(1/2) draws give a sparse Dirichlet(1/2)
    s.template_weights.push_back(total);
  }
  for (auto& w : s.template_weights) w /= total;
  s.adjective_rate = 0.8 * rng->Uniform01();
  s.pp_rate = 0.7 * rng->Uniform01();
  s.rare_rate = varied ? 0.5 + 0.4 * rng->Uniform01() : 0.2 * rng->Uniform01();
  return s;
}

class Generator {
 public:
  Generator(const Style& style, Rng* rng) : style_(style), rng_(*rng) {}

  Tree Sentence() {
    const double u = rng_.Uniform01();
    size_t choice = 0;
    while (choice + 1 < style_.template_weights.size() && u >= style_.template_weights[choice]) {
      ++choice;
    }
    switch (choice) {
      case 0:  // simple transitive
        return Root(Node("S", {Np(), Vp()}));
      case 1:  // prepositional phrase
        return Root(Node("S", {Np(), Node("VP", {Leaf("VBD", Pick(Lex().intransitive).past),
                                                 Pp()})}));
      case 2:  // subject relative clause
        return Root(Node(
            "S", {Node("NP", {SimpleNp(), Node("SBAR", {Node("WHNP", {Leaf("WDT", "that")}),
                                                         Node("S", {Vp()})})}),
                  IntransitiveVp()}));
      case 3:  // coordinated clauses
        return Root(Node("S", {Node("S", {Np(), IntransitiveVp()}), Leaf("CC", "and"),
                               Node("S", {Np(), Vp()})}));
      case 4:  // adverbial subordinate clause
        return Root(Node(
            "S", {Np(), Node("VP", {Leaf("VBD", Pick(Lex().intransitive).past),
                                    Node("SBAR", {Leaf("IN", "because"),
                                                  Node("S", {Np(), Vp()})})})}));
      case 5:  // infinitival complement
        return Root(Node(
            "S", {Np(), Node("VP", {Leaf("VBD", "wanted"),
                                    Node("S", {Node("VP", {Leaf("TO", "to"),
                                                           Node("VP", {Leaf("VB", Pick(Lex().transitive).base),
                                                                       Np()})})})})}));
      case 6:  // conjoined subject
        return Root(Node("S", {Node("NP", {SimpleNp(), Leaf("CC", "and"), SimpleNp()}),
                               IntransitiveVp()}));
      default:  // fragment
        return Node("FRAG", {Node("NP", {Leaf("DT", "the"), Leaf("JJ", Pick(Lex().adjectives)),
                                         Leaf("NN", Pick(Lex().nouns))}),
                             Leaf(".", ".")});
    }
  }

 private:
  template <typename T>
  const T& Pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(rng_.UniformIndex(v.size()))];
  }

  Tree Root(Tree s) {
    s.children.push_back(Leaf(".", "."));
    return s;
  }

  Tree SimpleNp() { return Node("NP", {Leaf("DT", "the"), Leaf("NN", Pick(Lex().nouns))}); }

  Tree Np() {
    std::vector<Tree> words{Leaf("DT", "the")};
    for (int k = 0; k < 3 && rng_.Uniform01() < style_.adjective_rate; ++k) {
      words.push_back(Leaf("JJ", Pick(Lex().adjectives)));
    }
    words.push_back(Leaf("NN", Pick(Lex().nouns)));
    return Node("NP", std::move(words));
  }

  Tree Vp() {
    std::vector<Tree> parts{Leaf("VBD", Pick(Lex().transitive).past), Np()};
    if (rng_.Uniform01() < style_.pp_rate) parts.push_back(Pp());
    return Node("VP", std::move(parts));
  }

  Tree IntransitiveVp() { return Node("VP", {Leaf("VBD", Pick(Lex().intransitive).past)}); }

  Tree Pp() { return Node("PP", {Leaf("IN", Pick(Lex().prepositions)), Np()}); }

  const Lexicon& Lex() {
    return rng_.Uniform01() < style_.rare_rate ? VariedLexicon() : PlainLexicon();
  }

  const Style& style_;
  Rng& rng_;
};

void CollectTokens(const Tree& t, std::vector<Token>* out) {
  if (t.IsLeaf()) {
    out->push_back({t.form, t.label});
    return;
  }
  for (const auto& c : t.children) CollectTokens(c, out);
}

std::string Id(const char* prefix, int n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04d", prefix, n);
  return buf;
}

}  // namespace

Corpus MakeTwoStyleCorpus(const CorpusOptions& options) {
  if (options.documents < 2 || options.max_docs_per_subject < 1 || options.min_sentences < 1 ||
      options.max_sentences < options.min_sentences) {
    throw Error(ErrorKind::kConfig, "invalid synthetic corpus options");
  }
  Rng rng(DeriveSeed(options.seed, "synth_corpus"));
  Corpus corpus;
  corpus.name = options.name;
  int subject = 0;
  int label = 0;
  while (static_cast<int>(corpus.documents.size()) < options.documents) {
    const int docs = 1 + static_cast<int>(rng.UniformIndex(options.max_docs_per_subject));
    const std::string subject_id = Id("s", subject++);
    const Style style = DrawStyle(label == 1, &rng);
    for (int k = 0; k < docs && static_cast<int>(corpus.documents.size()) < options.documents;
         ++k) {
      Document doc;
      doc.id = Id("d", static_cast<int>(corpus.documents.size()));
      doc.subject_id = subject_id;
      doc.label = label == 0 ? "plain" : "varied";
      Generator gen(style, &rng);
      const int sentences =
          options.min_sentences +
          static_cast<int>(rng.UniformIndex(options.max_sentences - options.min_sentences + 1));
      for (int s = 0; s < sentences; ++s) {
        const Tree t = gen.Sentence();
        CollectTokens(t, &doc.tokens);
        doc.trees.push_back(treepat::Render(t));
      }
      for (const auto& t : doc.tokens) {
        if (!doc.text.empty()) doc.text.push_back(' ');
        doc.text += t.form;
      }
      corpus.documents.push_back(std::move(doc));
    }
    label = 1 - label;
  }
  ValidateCorpus(corpus);
  return corpus;
}

FeatureTable MakeBlobTable(const BlobOptions& options) {
  if (options.documents < options.subjects || options.subjects < 2 || options.features < 2) {
    throw Error(ErrorKind::kConfig, "invalid blob options");
  }
  Rng rng(DeriveSeed(options.seed, "blobs"));
  FeatureTable table;
  std::vector<std::vector<double>> offsets(options.subjects);
  for (auto& o : offsets) {
    o.resize(options.features);
    for (auto& v : o) v = options.subject_spread * rng.Normal();
  }
  std::vector<std::string> labels;
  for (int d = 0; d < options.documents; ++d) {
    const int s = d % options.subjects;
    const int cls = s % 2;
    FeatureVector v;
    for (int f = 0; f < options.features; ++f) {
      const double mean = cls ? options.separation / 2 : -options.separation / 2;
      char name[16];
      std::snprintf(name, sizeof(name), "f%02d", f);
      v.Add(name, 2 * f < options.features ? FeatureGroup::kLexical : FeatureGroup::kSyntactic,
            mean + offsets[s][f] + rng.Normal());
    }
    labels.push_back(cls ? "b" : "a");
    table.AddRow(Id("d", d), Id("s", s), labels.back(), v);
  }
  if (options.shuffle_labels) {
    rng.Shuffle(labels);
    table.labels = labels;
  }
  return table;
}

}  // namespace lexsyn::synth
