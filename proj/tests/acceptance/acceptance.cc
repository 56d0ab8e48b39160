// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "revkg/annotation.h"
#include "revkg/corpus.h"
#include "revkg/crf.h"
#include "revkg/crf_kernels.h"
#include "revkg/error.h"
#include "revkg/kg.h"
#include "revkg/text_util.h"
#include "support.h"

using namespace revkg;
using namespace revkg::testing;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool cond, const std::string &what) {
    if (!cond && pass) {
      pass = false;
      detail = what;
    }
  }
};

// Subjects of a jsonl query run through the CLI.
std::set<std::string> QuerySubjects(const std::vector<std::string> &args, Outcome &o) {
  auto run = Cli(args);
  o.Require(run.code == 0, "query failed: " + run.err);
  std::set<std::string> out;
  for (const auto &line : Split(run.out, '\n')) {
    if (!line.empty()) out.insert(nlohmann::json::parse(line)["subject"].get<std::string>());
  }
  return out;
}

Outcome WorkedSubgraph() {
  Outcome o;
  TempDir dir;
  auto start = Clock::now();
  const auto reviews = DataPath("worked_reviews.jsonl");
  auto ex = Cli({"extract", "--in", reviews, "--mode", "gold", "--gold",
                 DataPath("worked_reviews.bio"), "--out", dir / "gold.bio"});
  o.Require(ex.code == 0, "extract failed: " + ex.err);
  auto graph = dir / "kg.graph";
  auto build = Cli({"--aliases", DataPath("aliases.tsv"), "--lexicon",
                    DataPath("concern_lexicon.tsv"), "build", "--ann", dir / "gold.bio",
                    "--graph", graph});
  o.Require(build.code == 0, "build failed: " + build.err);
  using S = std::set<std::string>;
  auto q = [&](std::vector<std::string> args) {
    args.insert(args.end(), {"--graph", graph, "--format", "jsonl"});
    return QuerySubjects(args, o);
  };
  o.Require(q({"query", "concerns", "--app", "Uber"}) == S{"Safety", "Accountability"},
            "Uber HAVING set differs");
  o.Require(q({"query", "reasons", "--concern", "Safety"}) ==
                S{"proxy drivers", "worst customer support"},
            "RAISES Safety set differs");
  o.Require(q({"query", "reasons", "--concern", "Accountability"}) == S{"worst customer support"},
            "RAISES Accountability set differs");
  o.Require(q({"query", "requirements", "--concern", "Safety"}) ==
                S{"face recognition", "proper emergency number"},
            "ADDRESSES Safety set differs");
  o.Require(q({"query", "requirements", "--concern", "Accountability"}) ==
                S{"proper emergency number"},
            "ADDRESSES Accountability set differs");
  double t = Seconds(start);
  o.Require(t < 1.0, "runtime " + FormatDouble(t) + " s");
  if (o.pass) o.detail = "exact match in " + FormatDouble(std::round(t * 1000) / 1000) + " s";
  return o;
}

KnowledgeGraph BuildGraph(const std::vector<const AnnotatedReview *> &reviews,
                          const AliasMap &aliases, const ConcernLexicon &lexicon) {
  KnowledgeGraph g(OntologySchema::Default(), aliases);
  for (const auto *r : reviews) LinkReview(g, *r, lexicon);
  return g;
}

Outcome GraphProperties() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const auto reviews = SyntheticGraphReviews(rng, 200);
  const auto aliases = LoadAliases(DataPath("aliases.tsv"));
  const auto lexicon = ConcernLexicon::Default();
  size_t violations = 0;
  const int kCases = 1000;
  for (int c = 0; c < kCases && o.pass; ++c) {
    // Random subset, random order, random partition into increments.
    std::vector<const AnnotatedReview *> subset;
    for (const auto &r : reviews) {
      if (rng() % 4 == 0) subset.push_back(&r);
    }
    const auto batch = BuildGraph(subset, aliases, lexicon);
    auto order = subset;
    std::shuffle(order.begin(), order.end(), rng);
    KnowledgeGraph acc(OntologySchema::Default(), aliases);
    for (size_t i = 0; i < order.size();) {
      size_t len = 1 + rng() % 8;
      std::vector<const AnnotatedReview *> part(
          order.begin() + i, order.begin() + std::min(order.size(), i + len));
      acc = MergeGraphs(acc, BuildGraph(part, aliases, lexicon));
      violations += acc.Violations().size();
      i += len;
    }
    o.Require(acc == batch, "incremental != batch in case " + std::to_string(c));
    o.Require(MergeGraphs(acc, acc) == acc, "merge not idempotent in case " + std::to_string(c));
    // Dedup: each (type, canonical label) appears once.
    std::set<std::pair<std::string, std::string>> identities;
    for (const auto &[id, n] : batch.nodes()) identities.insert({n.type, n.canonical_label});
    o.Require(identities.size() == batch.nodes().size(), "duplicate node identity");
    violations += batch.Violations().size();
  }
  o.Require(violations == 0, std::to_string(violations) + " invariant violations");
  if (o.pass) o.detail = std::to_string(kCases) + " cases over 200 reviews, 0 violations";
  return o;
}

Outcome ConcernTable() {
  Outcome o;
  auto report = ConcernDistribution(UberTableCorpus());
  std::string detail;
  for (const char *name : {"Safety", "Accountability"}) {
    const ConcernRow *row = nullptr;
    for (const auto &r : UberConcernTable()) {
      if (r.name == name) row = &r;
    }
    const auto *share = report.Find(name);
    o.Require(share != nullptr, std::string("missing ") + name);
    if (!share) break;
    double pct = share->review_share * 100;
    o.Require(std::abs(pct - row->percent) <= 0.1 + 1e-9,
              std::string(name) + " " + FormatDouble(pct) + "%");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%s %.2f%%", detail.empty() ? "" : ", ", name, pct);
    detail += buf;
  }
  for (const auto &r : UberConcernTable()) {
    const auto *share = report.Find(r.name);
    o.Require(share && std::abs(share->review_share * 100 - r.percent) <= 0.1 + 1e-9,
              r.name + " off by more than 0.1pp");
  }
  if (o.pass) o.detail = detail;
  return o;
}

Outcome CrfExactness() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937_64 rng(31);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    auto m = RandomModel(rng, 10, 2.0);
    size_t L = 1 + rng() % 6;
    auto f = RandomFeatures(rng, L, 10, 3);
    o.Require(ViterbiDecode(m, f) == BruteArgmax(m, f), "viterbi != brute force");
    double err = std::abs(LogPartition(m, f) - BruteLogPartition(m, f));
    worst = std::max(worst, err);
    o.Require(err <= 1e-8, "log Z error " + FormatDouble(err));
  }
  double t = Seconds(start);
  o.Require(t < 30.0, "runtime " + FormatDouble(t) + " s");
  if (o.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |log Z error| %.2e, %.2f s", worst, t);
    o.detail = buf;
  }
  return o;
}

Outcome GradientCheck() {
  Outcome o;
  std::mt19937_64 rng(37);
  const double h = 1e-5;
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    auto m = RandomModel(rng, 5, 1.0);
    std::vector<LabeledSentence> batch;
    for (size_t n = 1 + rng() % 3; n > 0; --n) {
      size_t len = 1 + rng() % 5;
      batch.push_back({RandomFeatures(rng, len, 5, 3), RandomTags(rng, len)});
    }
    const double l2 = Uniform(rng, 0.0, 0.5);
    auto grad = kernels::serial::Gradient(m, batch, l2);
    auto w = m.mutable_weights();
    for (size_t k = 0; k < m.num_weights(); ++k) {
      const double orig = w[k];
      w[k] = orig + h;
      double up = Objective(m, batch, l2);
      w[k] = orig - h;
      double down = Objective(m, batch, l2);
      w[k] = orig;
      double fd = (up - down) / (2 * h);
      double rel = std::abs(grad[k] - fd) / std::max(1.0, std::max(std::abs(grad[k]), std::abs(fd)));
      worst = std::max(worst, rel);
    }
  }
  o.Require(worst <= 1e-4, "relative error " + FormatDouble(worst));
  if (o.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "max relative error %.2e", worst);
    o.detail = buf;
  }
  return o;
}

Outcome Overfit() {
  Outcome o;
  TempDir dir;
  auto start = Clock::now();
  auto train = Cli({"train", "--pos", "--pos-data", DataPath("pos_train.tsv"), "--pos-out",
                    dir / "pos.model", "--crf", "--ann", DataPath("worked_reviews.bio"),
                    "--out", dir / "crf.model", "--epochs", "200"});
  o.Require(train.code == 0, "train failed: " + train.err);
  auto ex = Cli({"extract", "--in", DataPath("worked_reviews.jsonl"), "--mode", "model",
                 "--model", dir / "crf.model", "--pos-model", dir / "pos.model", "--out",
                 dir / "pred.bio"});
  o.Require(ex.code == 0, "extract failed: " + ex.err);
  double t = Seconds(start);
  if (!o.pass) return o;
  auto predicted = ReadAnnotations(dir / "pred.bio");
  auto gold = WorkedGold();
  o.Require(predicted.size() == gold.size(), "review count differs");
  size_t tokens = 0;
  for (size_t i = 0; i < predicted.size() && o.pass; ++i) {
    o.Require(predicted[i].sentences.size() == gold[i].sentences.size(), "sentence count");
    for (size_t s = 0; s < gold[i].sentences.size() && o.pass; ++s) {
      o.Require(predicted[i].sentences[s].tags == gold[i].sentences[s].tags,
                "tags differ in " + gold[i].review.id);
      tokens += gold[i].sentences[s].tags.size();
    }
  }
  auto epochs_at = train.out.find("crf epochs=");
  int epochs = epochs_at == std::string::npos ? 0 : std::stoi(train.out.substr(epochs_at + 11));
  o.Require(epochs > 0 && epochs <= 200, "epochs " + std::to_string(epochs));
  o.Require(t < 10.0, "runtime " + FormatDouble(t) + " s");
  if (o.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu tokens exact, %d epochs, %.2f s", tokens, epochs, t);
    o.detail = buf;
  }
  return o;
}

Outcome BioRoundTrip() {
  Outcome o;
  std::mt19937_64 rng(43);
  for (int i = 0; i < 1000; ++i) {
    size_t n = rng() % 20;
    auto spans = RandomSpans(rng, n);
    o.Require(BioToSpans(SpansToBio(spans, n)) == spans, "round-trip failed");
  }
  for (int i = 0; i < 1000; ++i) {
    size_t n = rng() % 20;
    auto spans = BioToSpans(RandomTags(rng, n));
    size_t prev_end = 0;
    for (const auto &s : spans) {
      o.Require(s.start < s.end && s.end <= n && s.start >= prev_end, "invalid span");
      prev_end = s.end;
    }
    // Re-encoding the decoded spans must not throw and must validate.
    o.Require(ValidateBio(SpansToBio(spans, n)).valid(), "re-encoded tags invalid");
  }
  if (o.pass) o.detail = "1000 round-trips, 1000 lenient decodes";
  return o;
}

Outcome Persistence() {
  Outcome o;
  TempDir dir;
  std::mt19937_64 rng(47);
  const auto aliases = LoadAliases(DataPath("aliases.tsv"));
  auto synthetic = SyntheticGraphReviews(rng, 200);
  KnowledgeGraph big(OntologySchema::Default(), aliases);
  for (const auto &r : synthetic) LinkReview(big, r, ConcernLexicon::Default());
  KnowledgeGraph one;
  one.UpsertNode("App", "Uber", "r1");
  std::vector<KnowledgeGraph> graphs = {KnowledgeGraph{}, one, WorkedGraph(1), WorkedGraph(),
                                        big};
  for (const auto &g : graphs) {
    SaveGraph(g, dir / "g.graph");
    o.Require(LoadGraph(dir / "g.graph") == g, "save/load mismatch");
    size_t statements = 0;
    for (const auto &line : Split(ExportGraph(g, ExportFormat::kCypher), '\n')) {
      statements += !line.empty();
    }
    o.Require(statements == g.nodes().size() + g.edges().size(), "cypher statement count");
    auto parsed = ParseGraphmlDoc(ExportGraph(g, ExportFormat::kGraphml));
    o.Require(parsed.nodes.size() == g.nodes().size(), "graphml node count");
    for (const auto &[id, n] : g.nodes()) {
      auto it = parsed.nodes.find(id);
      o.Require(it != parsed.nodes.end() && it->second.at("type") == n.type &&
                    it->second.at("canonical_label") == n.canonical_label,
                "graphml node differs");
    }
    std::set<EdgeKey> edges;
    for (const auto &[src, dst, data] : parsed.edges) edges.insert({src, data.at("relation"), dst});
    std::set<EdgeKey> expected;
    for (const auto &[k, e] : g.edges()) expected.insert(k);
    o.Require(edges == expected && parsed.edges.size() == g.edges().size(),
              "graphml edges differ");
  }
  if (o.pass) o.detail = std::to_string(graphs.size()) + " graphs";
  return o;
}

Outcome Determinism() {
  Outcome o;
  TempDir dir;
  for (const char *tag : {"a", "b"}) {
    std::string t = tag;
    auto run = Cli({"--seed", "11", "train", "--pos", "--pos-data", DataPath("pos_train.tsv"),
                    "--pos-out", dir / ("pos." + t), "--crf", "--ann",
                    DataPath("worked_reviews.bio"), "--out", dir / ("crf." + t)});
    o.Require(run.code == 0, "train failed: " + run.err);
  }
  if (!o.pass) return o;
  o.Require(ReadFile(dir / "pos.a") == ReadFile(dir / "pos.b"), "POS model bytes differ");
  o.Require(ReadFile(dir / "crf.a") == ReadFile(dir / "crf.b"), "CRF model bytes differ");
  if (o.pass) o.detail = "POS and CRF model files byte-identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"worked-subgraph", WorkedSubgraph},
      {"graph-properties", GraphProperties},
      {"concern-distribution", ConcernTable},
      {"crf-exactness", CrfExactness},
      {"gradient-check", GradientCheck},
      {"overfit-worked-reviews", Overfit},
      {"bio-round-trip", BioRoundTrip},
      {"persistence-export", Persistence},
      {"determinism", Determinism},
  };
  int failures = 0;
  for (const auto &[name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
