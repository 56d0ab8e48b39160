// Shared fixtures, generators and brute-force oracles for the test binaries.
#ifndef REVKG_TESTS_SUPPORT_H_
#define REVKG_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "revkg/annotation.h"
#include "revkg/cli.h"
#include "revkg/corpus.h"
#include "revkg/crf.h"
#include "revkg/kg.h"
#include "revkg/pos_tagger.h"
#include "revkg/textproc.h"

namespace revkg::testing {

inline std::string DataPath(const std::string &name) {
  return std::string(REVKG_DATA_DIR) + "/" + name;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag = "revkg") {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  std::string operator/(const std::string &name) const { return (path_ / name).string(); }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliRun Cli(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  CliRun run;
  run.code = RunCli(args, out, err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

inline size_t CountOccurrences(const std::string &haystack, const std::string &needle) {
  size_t n = 0;
  for (size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Worked reviews

inline Corpus WorkedCorpus() {
  return LoadReviews(DataPath("worked_reviews.jsonl"), CorpusFormat::kJsonl,
                     ConcernVocabulary::Default());
}

inline std::vector<AnnotatedReview> WorkedGold() {
  return ReadAnnotations(DataPath("worked_reviews.bio"));
}

inline KnowledgeGraph WorkedGraph(size_t count = 2) {
  KnowledgeGraph g(OntologySchema::Default(), LoadAliases(DataPath("aliases.tsv")));
  auto lexicon = ConcernLexicon::Load(DataPath("concern_lexicon.tsv"));
  auto gold = WorkedGold();
  for (size_t i = 0; i < count && i < gold.size(); ++i) LinkReview(g, gold[i], lexicon);
  return g;
}

// ---------------------------------------------------------------------------
// Uber concern table: reported percentages and the per-review counts over
// 399 reviews that reproduce them.

struct ConcernRow {
  std::string name;
  size_t count;
  double percent;
};

inline const std::vector<ConcernRow> &UberConcernTable() {
  static const std::vector<ConcernRow> rows = {
      {"Safety", 108, 27.1},
      {"Accountability", 69, 17.3},
      {"Scam", 63, 15.8},
      {"Discrimination", 28, 7.0},
      {"Transparency", 18, 4.5},
      {"Privacy", 13, 3.3},
      {"Accessibility", 11, 2.8},
      {"Sustainability", 6, 1.5},
      {"Identity Theft", 6, 1.5},
      {"Cyberbullying/Toxicity", 3, 0.7},
      {"Spreading False Information", 2, 0.5},
      {"Inappropriate Content", 1, 0.2},
  };
  return rows;
}

inline constexpr size_t kUberReviews = 399;

// 399 Uber reviews, one label per labeled review, shuffled with a fixed seed.
inline Corpus UberTableCorpus(uint64_t seed = 7) {
  std::vector<std::string> labels;
  for (const auto &row : UberConcernTable()) labels.insert(labels.end(), row.count, row.name);
  labels.resize(kUberReviews);  // the remainder stay unlabeled
  std::mt19937_64 rng(seed);
  std::shuffle(labels.begin(), labels.end(), rng);
  Corpus c;
  for (size_t i = 0; i < kUberReviews; ++i) {
    Review r;
    r.id = "uber-" + std::to_string(i + 1);
    r.app = "Uber";
    r.text = "review text " + std::to_string(i + 1);
    if (!labels[i].empty()) r.concern_labels.insert(labels[i]);
    c.reviews.push_back(std::move(r));
  }
  return c;
}

// ---------------------------------------------------------------------------
// BIO generators

inline std::vector<EntitySpan> RandomSpans(std::mt19937_64 &rng, size_t length) {
  std::vector<EntitySpan> spans;
  size_t i = 0;
  while (i < length) {
    if (rng() % 3 == 0) {
      size_t len = 1 + rng() % std::min<size_t>(4, length - i);
      auto kind = static_cast<EntityKind>(rng() % 3);
      spans.push_back({kind, i, i + len, {}});
      i += len;
    } else {
      ++i;
    }
  }
  return spans;
}

inline std::vector<BioTag> RandomTags(std::mt19937_64 &rng, size_t length) {
  std::vector<BioTag> tags(length);
  for (auto &t : tags) t = static_cast<BioTag>(rng() % kNumBioTags);
  return tags;
}

// ---------------------------------------------------------------------------
// CRF generators and brute-force oracles

inline double Uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline CrfModel RandomModel(std::mt19937_64 &rng, size_t num_attributes, double scale) {
  std::vector<std::string> names;
  for (size_t a = 0; a < num_attributes; ++a) names.push_back("a" + std::to_string(a));
  CrfModel model(names);
  for (double &w : model.mutable_weights()) w = Uniform(rng, -scale, scale);
  return model;
}

inline SentenceFeatures RandomFeatures(std::mt19937_64 &rng, size_t length,
                                       size_t num_attributes, size_t per_position) {
  SentenceFeatures f;
  for (size_t t = 0; t < length; ++t) {
    std::vector<uint32_t> ids;
    for (size_t k = 0; k < per_position; ++k) ids.push_back(rng() % num_attributes);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    f.positions.push_back(std::move(ids));
  }
  return f;
}

// Calls fn(tags) for every one of 7^L sequences in lexicographic order.
template <typename Fn>
void ForEachSequence(size_t length, Fn fn) {
  std::vector<BioTag> tags(length, BioTag::kO);
  while (true) {
    fn(tags);
    size_t i = length;
    while (i > 0) {
      --i;
      auto v = static_cast<size_t>(tags[i]) + 1;
      if (v < kNumBioTags) {
        tags[i] = static_cast<BioTag>(v);
        break;
      }
      tags[i] = BioTag::kO;
      if (i == 0) return;
    }
    if (length == 0) return;
  }
}

inline double BruteLogPartition(const CrfModel &m, const SentenceFeatures &f) {
  std::vector<double> scores;
  ForEachSequence(f.size(), [&](const std::vector<BioTag> &tags) {
    scores.push_back(SequenceScore(m, f, tags));
  });
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0;
  for (double s : scores) sum += std::exp(s - mx);
  return mx + std::log(sum);
}

// First sequence (lexicographic) reaching the maximum score.
inline std::vector<BioTag> BruteArgmax(const CrfModel &m, const SentenceFeatures &f) {
  std::vector<BioTag> best;
  double best_score = -std::numeric_limits<double>::infinity();
  ForEachSequence(f.size(), [&](const std::vector<BioTag> &tags) {
    double s = SequenceScore(m, f, tags);
    if (s > best_score) {
      best_score = s;
      best = tags;
    }
  });
  return best;
}

// ---------------------------------------------------------------------------
// Synthetic POS corpus from a fixed unambiguous lexicon.

inline std::vector<PosSentence> SyntheticPosCorpus(std::mt19937_64 &rng, size_t n) {
  const std::vector<std::pair<PosTag, std::vector<std::string>>> lexicon = {
      {PosTag::kDet, {"the", "a", "every", "this"}},
      {PosTag::kAdj, {"rude", "late", "unsafe", "expensive", "friendly", "dirty"}},
      {PosTag::kNoun, {"driver", "app", "ride", "fare", "car", "support", "refund",
                       "trip", "route", "passenger"}},
      {PosTag::kVerb, {"cancelled", "charged", "ignored", "drove", "took", "needs"}},
      {PosTag::kAdv, {"never", "always", "quickly", "again"}},
      {PosTag::kAdp, {"for", "on", "with", "without"}},
      {PosTag::kPron, {"i", "they", "we", "it"}},
      {PosTag::kNum, {"2", "10", "3.5", "40"}},
      {PosTag::kConj, {"and", "but"}},
      {PosTag::kPunct, {".", "!"}},
  };
  auto words_of = [&](PosTag tag) -> const std::vector<std::string> & {
    for (const auto &[t, words] : lexicon) {
      if (t == tag) return words;
    }
    return lexicon.front().second;
  };
  using P = PosTag;
  const std::vector<std::vector<PosTag>> templates = {
      {P::kDet, P::kAdj, P::kNoun, P::kVerb, P::kPron, P::kPunct},
      {P::kPron, P::kVerb, P::kDet, P::kNoun, P::kAdp, P::kNum, P::kPunct},
      {P::kDet, P::kNoun, P::kAdv, P::kVerb, P::kConj, P::kPron, P::kVerb, P::kPunct},
      {P::kPron, P::kAdv, P::kVerb, P::kAdp, P::kDet, P::kAdj, P::kNoun, P::kPunct},
      {P::kDet, P::kNoun, P::kVerb, P::kNum, P::kNoun, P::kPunct},
  };
  std::vector<PosSentence> out;
  for (size_t i = 0; i < n; ++i) {
    const auto &tpl = templates[rng() % templates.size()];
    PosSentence s;
    for (PosTag tag : tpl) {
      const auto &words = words_of(tag);
      s.words.push_back(words[rng() % words.size()]);
      s.tags.push_back(tag);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic NER corpus: spans of each kind draw words from their own
// vocabulary, filler from another, so the generator's emission table is
// recoverable from the data.

inline AnnotatedSentence SyntheticNerSentence(std::mt19937_64 &rng, size_t base) {
  static const std::vector<std::string> kFiller = {
      "the", "app", "is", "really", "when", "i", "took", "my", "ride", "today",
      "and", "it", "was", "again", "for", "we"};
  static const std::vector<std::vector<std::string>> kBegin = {
      {"unsafe", "scam", "unfair", "insecure"},
      {"proxy", "rude", "hidden", "fake"},
      {"panic", "face", "refund", "emergency"}};
  static const std::vector<std::vector<std::string>> kInside = {
      {"behaviour", "practice", "overall"},
      {"drivers", "fees", "accounts", "charges"},
      {"button", "recognition", "option", "number"}};
  AnnotatedSentence s;
  std::vector<std::string> words;
  std::vector<EntitySpan> spans;
  size_t len = 4 + rng() % 8;
  while (words.size() < len) {
    if (rng() % 4 == 0) {
      size_t kind = rng() % 3;
      size_t start = words.size();
      words.push_back(kBegin[kind][rng() % kBegin[kind].size()]);
      size_t inner = rng() % 3;
      for (size_t k = 0; k < inner; ++k) {
        words.push_back(kInside[kind][rng() % kInside[kind].size()]);
      }
      spans.push_back({static_cast<EntityKind>(kind), start, words.size(), {}});
    } else {
      words.push_back(kFiller[rng() % kFiller.size()]);
    }
  }
  size_t offset = base;
  for (const auto &w : words) {
    Token t;
    t.text = w;
    t.start = offset;
    t.end = offset + w.size();
    t.pos = PosTag::kNoun;
    offset = t.end + 1;
    s.tokens.push_back(std::move(t));
  }
  s.tokens = ChunkTokens(std::move(s.tokens));
  s.tags = SpansToBio(spans, words.size());
  return s;
}

// `n` sentences, one review per sentence, with 4-column token data.
inline std::vector<AnnotatedReview> SyntheticNerCorpus(std::mt19937_64 &rng, size_t n) {
  std::vector<AnnotatedReview> out;
  for (size_t i = 0; i < n; ++i) {
    AnnotatedReview r;
    r.review.id = "syn-" + std::to_string(i);
    r.review.app = "Uber";
    r.sentences.push_back(SyntheticNerSentence(rng, 0));
    std::string text;
    for (const auto &t : r.sentences[0].tokens) {
      if (!text.empty()) text += ' ';
      text += t.text;
    }
    r.review.text = text;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic annotated reviews for graph properties. Phrase pools include
// case/spacing variants, alias targets, lexicon hits and misses so dedup,
// alias and fallback paths all fire.

inline AnnotatedReview SyntheticGraphReview(std::mt19937_64 &rng, size_t index) {
  static const std::vector<std::string> kApps = {"Uber", "uber", "Lyft", "Bolt"};
  static const std::vector<std::string> kConcerns = {
      "unsafe", "scam", "privacy", "unacceptable", "terrible", "Unsafe ride",
      "no accountability", "discrimination", "awful"};
  static const std::vector<std::string> kIssues = {
      "proxy drivers", "Proxy Drivers", "rude driver", "hidden fees",
      "no customer support", "late pickup", "worst customer support"};
  static const std::vector<std::string> kRequirements = {
      "face recognition", "Face Recofnition", "panic button", "refund option",
      "proper emergency number", "vehicle choice"};
  static const std::vector<std::string> kFiller = {"the", "app", "was", "so",
                                                   "i", "want", "it", "today"};
  const auto &vocab = ConcernVocabulary::Default().names();

  AnnotatedReview r;
  r.review.id = "rev-" + std::to_string(index);
  r.review.app = kApps[rng() % kApps.size()];
  if (rng() % 3 != 0) {
    size_t k = 1 + rng() % 2;
    for (size_t i = 0; i < k; ++i) r.review.concern_labels.insert(vocab[rng() % 4]);
  }
  size_t sentences = 1 + rng() % 3;
  std::string text;
  for (size_t si = 0; si < sentences; ++si) {
    std::vector<std::string> words;
    std::vector<EntitySpan> spans;
    size_t segments = 1 + rng() % 4;
    for (size_t g = 0; g < segments; ++g) {
      size_t choice = rng() % 5;
      const std::vector<std::string> *pool = nullptr;
      EntityKind kind = EntityKind::kConcern;
      if (choice == 0) pool = &kConcerns, kind = EntityKind::kConcern;
      if (choice == 1) pool = &kIssues, kind = EntityKind::kIssue;
      if (choice == 2) pool = &kRequirements, kind = EntityKind::kRequirement;
      if (pool == nullptr) {
        words.push_back(kFiller[rng() % kFiller.size()]);
        continue;
      }
      size_t start = words.size();
      std::istringstream phrase((*pool)[rng() % pool->size()]);
      for (std::string w; phrase >> w;) words.push_back(w);
      spans.push_back({kind, start, words.size(), {}});
    }
    if (!text.empty()) text += ' ';
    const size_t base = text.size();
    AnnotatedSentence s;
    size_t offset = base;
    for (const auto &w : words) {
      s.tokens.push_back({w, offset, offset + w.size(), std::nullopt, std::nullopt});
      text += w + ' ';
      offset += w.size() + 1;
    }
    text.back() = '.';
    s.tokens.push_back({".", offset - 1, offset, std::nullopt, std::nullopt});
    s.tags = SpansToBio(spans, s.tokens.size());
    r.sentences.push_back(std::move(s));
  }
  r.review.text = text;
  return r;
}

inline std::vector<AnnotatedReview> SyntheticGraphReviews(std::mt19937_64 &rng, size_t n) {
  std::vector<AnnotatedReview> out;
  for (size_t i = 0; i < n; ++i) out.push_back(SyntheticGraphReview(rng, i));
  return out;
}

// ---------------------------------------------------------------------------
// Minimal GraphML reader: just enough XML to read back our own export.

struct ParsedGraphml {
  // id -> (key -> value)
  std::map<std::string, std::map<std::string, std::string>> nodes;
  // (source, target, data)
  std::vector<std::tuple<std::string, std::string, std::map<std::string, std::string>>> edges;
};

inline std::string XmlUnescape(const std::string &s) {
  static const std::vector<std::pair<std::string, char>> kEntities = {
      {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}, {"&amp;", '&'}};
  std::string out;
  for (size_t i = 0; i < s.size();) {
    bool matched = false;
    if (s[i] == '&') {
      for (const auto &[ent, c] : kEntities) {
        if (s.compare(i, ent.size(), ent) == 0) {
          out += c;
          i += ent.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += s[i++];
  }
  return out;
}

inline std::string XmlAttribute(const std::string &tag, const std::string &name) {
  const std::string key = " " + name + "=\"";
  size_t p = tag.find(key);
  if (p == std::string::npos) return {};
  p += key.size();
  return XmlUnescape(tag.substr(p, tag.find('"', p) - p));
}

inline ParsedGraphml ParseGraphmlDoc(const std::string &xml) {
  ParsedGraphml g;
  std::map<std::string, std::string> *current = nullptr;
  size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    size_t close = xml.find('>', pos);
    std::string tag = xml.substr(pos, close - pos + 1);
    if (tag.rfind("<node ", 0) == 0) {
      current = &g.nodes[XmlAttribute(tag, "id")];
    } else if (tag.rfind("<edge ", 0) == 0) {
      g.edges.emplace_back(XmlAttribute(tag, "source"), XmlAttribute(tag, "target"),
                           std::map<std::string, std::string>{});
      current = &std::get<2>(g.edges.back());
    } else if (tag.rfind("<data ", 0) == 0 && current != nullptr) {
      size_t end = xml.find("</data>", close);
      (*current)[XmlAttribute(tag, "key")] =
          XmlUnescape(xml.substr(close + 1, end - close - 1));
    } else if (tag == "</node>" || tag == "</edge>") {
      current = nullptr;
    }
    pos = close + 1;
  }
  return g;
}

}  // namespace revkg::testing

#endif  // REVKG_TESTS_SUPPORT_H_
