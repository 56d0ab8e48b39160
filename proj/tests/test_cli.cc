#include <random>

#include "doctest.h"
#include "revkg/annotation.h"
#include "revkg/kg.h"
#include "revkg/text_util.h"
#include "support.h"

using namespace revkg;
using namespace revkg::testing;

namespace {

std::string Reviews() { return DataPath("worked_reviews.jsonl"); }
std::string Gold() { return DataPath("worked_reviews.bio"); }

std::vector<std::string> Build(const std::vector<std::string> &ann, const std::string &graph) {
  std::vector<std::string> args = {"--aliases", DataPath("aliases.tsv"), "--lexicon",
                                   DataPath("concern_lexicon.tsv"), "build"};
  for (const auto &a : ann) {
    args.push_back("--ann");
    args.push_back(a);
  }
  args.push_back("--graph");
  args.push_back(graph);
  return args;
}

// Builds the worked graph in `dir` and returns its path.
std::string WorkedGraphFile(const TempDir &dir) {
  auto path = dir / "kg.graph";
  REQUIRE(Cli(Build({Gold()}, path)).code == 0);
  return path;
}

}  // namespace

TEST_CASE("ingest") {
  auto ok = Cli({"ingest", "--in", Reviews()});
  CHECK(ok.code == 0);
  CHECK(ok.out == "records=2\n");

  CHECK(Cli({"ingest", "--in", "/nonexistent/reviews.jsonl"}).code == 2);
  CHECK(Cli({"ingest"}).code == 2);
  CHECK(Cli({}).code == 2);
  CHECK(Cli({"frobnicate"}).code == 2);

  auto stats = Cli({"ingest", "--in", Reviews(), "--stats"});
  CHECK(stats.code == 0);
  CHECK(stats.out.find("Safety") != std::string::npos);
  CHECK(stats.out.find("Accountability") != std::string::npos);

  TempDir dir;
  WriteFile(dir / "bad.jsonl", "{\"id\": \"x\", \"app\": \"Uber\"}\n");
  auto bad = Cli({"ingest", "--in", dir / "bad.jsonl"});
  CHECK(bad.code == 2);
  CHECK(bad.err.rfind("error:", 0) == 0);

  auto filtered = Cli({"ingest", "--in", Reviews(), "--app", "Lyft", "--out", dir / "o.jsonl"});
  CHECK(filtered.out == "records=0\n");
  CHECK(ReadFile(dir / "o.jsonl").empty());

  CHECK(Cli({"--help"}).code == 0);
}

TEST_CASE("train is deterministic per seed") {
  TempDir dir;
  auto run = [&](const std::string &tag) {
    auto r = Cli({"--seed", "5", "train", "--pos", "--pos-data", DataPath("pos_train.tsv"),
                  "--pos-out", dir / ("pos" + tag), "--crf", "--ann", Gold(), "--out",
                  dir / ("crf" + tag), "--log", dir / ("log" + tag)});
    CHECK(r.code == 0);
    return r;
  };
  auto a = run("a");
  auto b = run("b");
  CHECK(a.out == b.out);
  CHECK(a.out.find("pos iterations=10 training_accuracy=1\n") == 0);
  CHECK(ReadFile(dir / "posa") == ReadFile(dir / "posb"));
  CHECK(ReadFile(dir / "crfa") == ReadFile(dir / "crfb"));
  CHECK(ReadFile(dir / "loga").rfind("epoch,mean_loglik,token_accuracy\n", 0) == 0);
}

TEST_CASE("train input errors") {
  TempDir dir;
  WriteFile(dir / "empty.bio", "");
  CHECK(Cli({"train", "--crf", "--ann", dir / "empty.bio", "--out", dir / "m"}).code == 2);
  CHECK(Cli({"train"}).code == 2);
  // Gold tokens lack POS and no tagger was given.
  CHECK(Cli({"train", "--crf", "--ann", Gold(), "--out", dir / "m"}).code == 2);
}

TEST_CASE("train on a synthetic generator corpus") {
  std::mt19937_64 rng(113);
  TempDir dir;
  WriteAnnotations(SyntheticNerCorpus(rng, 100), dir / "synth.bio");
  auto r = Cli({"train", "--crf", "--ann", dir / "synth.bio", "--out", dir / "m.crf"});
  REQUIRE(r.code == 0);
  auto pos = r.out.find("training_accuracy=");
  REQUIRE(pos != std::string::npos);
  CHECK(ParseDouble(Trim(r.out.substr(pos + 18))) >= 0.95);
}

TEST_CASE("extract") {
  TempDir dir;
  auto gold = Cli({"extract", "--in", Reviews(), "--mode", "gold", "--gold", Gold(), "--out",
                   dir / "out.bio"});
  CHECK(gold.code == 0);
  CHECK(gold.out == "reviews=2 spans=6\n");
  CHECK(ReadAnnotations(dir / "out.bio") == ReadAnnotations(Gold()));

  CHECK(Cli({"extract", "--in", Reviews(), "--mode", "model"}).code == 2);
  CHECK(Cli({"extract", "--in", Reviews(), "--mode", "guess"}).code == 2);

  REQUIRE(Cli({"train", "--pos", "--pos-data", DataPath("pos_train.tsv"), "--pos-out",
               dir / "pos", "--crf", "--ann", Gold(), "--out", dir / "crf"})
              .code == 0);
  auto model = Cli({"extract", "--in", Reviews(), "--mode", "model", "--model", dir / "crf",
                    "--pos-model", dir / "pos", "--out", dir / "pred.bio"});
  CHECK(model.code == 0);
  CHECK(model.out == "reviews=2 spans=6\n");
  auto predicted = ReadAnnotations(dir / "pred.bio");
  auto expected = ReadAnnotations(Gold());
  REQUIRE(predicted.size() == expected.size());
  for (size_t i = 0; i < predicted.size(); ++i) {
    REQUIRE(predicted[i].sentences.size() == expected[i].sentences.size());
    for (size_t s = 0; s < predicted[i].sentences.size(); ++s) {
      CHECK(predicted[i].sentences[s].Spans() == expected[i].sentences[s].Spans());
    }
  }
}

TEST_CASE("build is idempotent and incremental") {
  TempDir dir;
  auto path = dir / "kg.graph";
  auto first = Cli(Build({Gold()}, path));
  CHECK(first.code == 0);
  CHECK(first.out == "nodes=7 edges=10\n");
  const auto bytes = ReadFile(path);
  auto again = Cli(Build({Gold()}, path));
  CHECK(again.out == "nodes=7 edges=10\n");
  CHECK(ReadFile(path) == bytes);

  auto gold = ReadAnnotations(Gold());
  WriteAnnotations({gold[0]}, dir / "r1.bio");
  WriteAnnotations({gold[1]}, dir / "r2.bio");
  auto inc = dir / "inc.graph";
  CHECK(Cli(Build({dir / "r1.bio"}, inc)).out == "nodes=4 edges=4\n");
  CHECK(Cli(Build({dir / "r2.bio"}, inc)).out == "nodes=7 edges=10\n");
  CHECK(ReadFile(inc) == bytes);

  auto both = dir / "both.graph";
  CHECK(Cli(Build({dir / "r2.bio", dir / "r1.bio"}, both)).code == 0);
  CHECK(ReadFile(both) == bytes);

  // A graph written under different aliases cannot be merged into.
  CHECK(Cli({"build", "--ann", Gold(), "--graph", path}).code == 2);
}

TEST_CASE("query") {
  TempDir dir;
  auto graph = WorkedGraphFile(dir);
  auto concerns = Cli({"query", "concerns", "--graph", graph, "--app", "Uber"});
  CHECK(concerns.code == 0);
  CHECK(concerns.out.find("Safety") < concerns.out.find("Accountability"));

  auto shared = Cli({"query", "shared-issues", "--graph", graph});
  CHECK(shared.out.find("worst customer support: Safety, Accountability") != std::string::npos);

  auto reasons = Cli({"query", "reasons", "--graph", graph, "--concern", "Safety"});
  CHECK(reasons.out.find("proxy drivers") != std::string::npos);
  CHECK(reasons.out.find("worst customer support") != std::string::npos);

  auto reqs = Cli({"query", "requirements", "--graph", graph, "--concern", "Safety",
                   "--format", "jsonl"});
  CHECK(CountOccurrences(reqs.out, "\n") == 2);
  CHECK(reqs.out.find("\"query\":\"requirements_for_concern\"") != std::string::npos);

  CHECK(Cli({"query", "patterns", "--graph", graph}).code == 0);
  CHECK(Cli({"query", "shared-requirements", "--graph", graph}).out.find(
            "proper emergency number") != std::string::npos);

  auto unknown = Cli({"query", "frobnicate", "--graph", graph});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("shared-issues") != std::string::npos);

  CHECK(Cli({"query", "concerns", "--graph", graph, "--app", "Zoom"}).code == 2);
  CHECK(Cli({"query", "reasons", "--graph", graph, "--concern", "Weather"}).code == 2);
  CHECK(Cli({"query", "reasons", "--graph", graph}).code == 2);
}

TEST_CASE("export and stats") {
  TempDir dir;
  auto graph = WorkedGraphFile(dir);
  auto dot = Cli({"export", "--graph", graph, "--format", "dot"});
  CHECK(dot.code == 0);
  CHECK(dot.out.rfind("digraph", 0) == 0);

  auto cypher = Cli({"export", "--graph", graph, "--format", "cypher"});
  CHECK(CountOccurrences(cypher.out, "MERGE") == 17);

  CHECK(Cli({"export", "--graph", graph, "--format", "svg"}).code == 2);
  CHECK(Cli({"export", "--graph", graph, "--format", "graphml", "--out", dir / "g.xml"}).code ==
        0);
  CHECK(ParseGraphmlDoc(ReadFile(dir / "g.xml")).nodes.size() == 7);

  auto stats = Cli({"stats", "--graph", graph});
  CHECK(stats.out.rfind("nodes=7 edges=10\n", 0) == 0);
  CHECK(Cli({"stats"}).code == 2);
  CHECK(Cli({"stats", "--in", Reviews()}).out.find("Safety") != std::string::npos);
}

TEST_CASE("corrupt graph files are rejected") {
  TempDir dir;
  auto graph = WorkedGraphFile(dir);
  auto text = ReadFile(graph);
  WriteFile(graph, text + "n0000000000000000\tRAISES\tn0000000000000001\tx\n");
  auto r = Cli({"stats", "--graph", graph});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}
