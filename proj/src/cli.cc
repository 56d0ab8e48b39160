#include "revkg/cli.h"

#include <algorithm>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "revkg/annotation.h"
#include "revkg/corpus.h"
#include "revkg/crf.h"
#include "revkg/error.h"
#include "revkg/kg.h"
#include "revkg/ner.h"
#include "revkg/ontology.h"
#include "revkg/pos_tagger.h"
#include "revkg/query.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

const std::vector<std::string> kQueryNames = {
    "concerns", "reasons", "requirements", "shared-issues", "shared-requirements",
    "patterns"};

struct GlobalOptions {
  uint64_t seed = 1;
  std::string schema;
  std::string aliases;
  std::string lexicon;
  std::string taxonomy;
  bool verbose = false;
};

struct Options {
  GlobalOptions global;

  // ingest
  std::string in;
  std::string format = "auto";
  std::string app;
  std::string out;
  bool stats = false;

  // train
  bool pos = false;
  bool crf = false;
  std::string pos_data;
  std::string pos_out;
  int pos_iterations = 10;
  std::string ann;
  std::string pos_model;
  std::string log;
  CrfTrainConfig crf_config;

  // extract
  std::string mode = "gold";
  std::string gold;
  std::string model;

  // build
  std::vector<std::string> ann_files;
  std::string graph;

  // query / export
  std::string query;
  std::string concern;
  std::string render = "text";
};

class Pipeline {
 public:
  Pipeline(const Options &opts, std::ostream &out, std::ostream &err)
      : o_(opts), out_(out), err_(err) {}

  int Ingest();
  int Train();
  int Extract();
  int Build();
  int Query();
  int Export();
  int Stats();

 private:
  void Log(const std::string &msg) {
    if (o_.global.verbose) err_ << "[revkg] " << msg << "\n";
  }
  ConcernVocabulary Vocabulary() const {
    return o_.global.taxonomy.empty() ? ConcernVocabulary::Default()
                                      : ConcernVocabulary::Load(o_.global.taxonomy);
  }
  OntologySchema Schema() const {
    return o_.global.schema.empty() ? OntologySchema::Default()
                                    : OntologySchema::Load(o_.global.schema);
  }
  AliasMap Aliases() const {
    return o_.global.aliases.empty() ? AliasMap{} : LoadAliases(o_.global.aliases);
  }
  ConcernLexicon Lexicon() const {
    auto vocab = Vocabulary();
    return o_.global.lexicon.empty() ? ConcernLexicon::Default(vocab)
                                     : ConcernLexicon::Load(o_.global.lexicon, vocab);
  }
  Corpus LoadCorpus(const std::string &path) const {
    CorpusFormat format = FormatFromPath(path);
    if (o_.format == "jsonl") format = CorpusFormat::kJsonl;
    if (o_.format == "csv") format = CorpusFormat::kCsv;
    return LoadReviews(path, format, Vocabulary());
  }

  const Options &o_;
  std::ostream &out_;
  std::ostream &err_;
};

int Pipeline::Ingest() {
  Corpus corpus = LoadCorpus(o_.in);
  Log("loaded " + std::to_string(corpus.size()) + " reviews from " + o_.in);
  if (!o_.app.empty()) corpus = FilterByApp(corpus, o_.app);
  if (!o_.out.empty()) SaveReviews(corpus, o_.out, FormatFromPath(o_.out));
  out_ << "records=" << corpus.size() << "\n";
  if (o_.stats) out_ << FormatDistribution(ConcernDistribution(corpus));
  return kExitOk;
}

int Pipeline::Train() {
  if (!o_.pos && !o_.crf) throw Error("train needs --pos and/or --crf");
  if (o_.pos) {
    if (o_.pos_data.empty() || o_.pos_out.empty()) {
      throw Error("--pos needs --pos-data and --pos-out");
    }
    PosTrainConfig config;
    config.iterations = o_.pos_iterations;
    config.seed = o_.global.seed;
    auto result = TrainPosTagger(ReadPosTrainingData(o_.pos_data), config);
    result.model.Save(o_.pos_out);
    out_ << "pos iterations=" << config.iterations
         << " training_accuracy=" << FormatDouble(result.training_accuracy) << "\n";
  }
  if (o_.crf) {
    if (o_.ann.empty() || o_.out.empty()) throw Error("--crf needs --ann and --out");
    auto gold = ReadAnnotations(o_.ann);
    std::optional<PosModel> pos;
    if (!o_.pos_model.empty()) {
      pos = PosModel::Load(o_.pos_model);
    } else if (o_.pos && !o_.pos_out.empty()) {
      pos = PosModel::Load(o_.pos_out);
    }
    PrepareReviews(gold, pos ? &*pos : nullptr);
    CrfTrainConfig config = o_.crf_config;
    config.seed = o_.global.seed;
    auto result = TrainCrf(gold, config);
    result.model.Save(o_.out);
    if (!o_.log.empty()) WriteFile(o_.log, FormatTrainingLog(result.log));
    if (o_.global.verbose) {
      for (const auto &e : result.log) {
        Log("epoch " + std::to_string(e.epoch) + " loglik " + FormatDouble(e.mean_loglik) +
            " acc " + FormatDouble(e.token_accuracy));
      }
    }
    const auto &last = result.log.back();
    out_ << "crf epochs=" << last.epoch << " mean_loglik=" << FormatDouble(last.mean_loglik)
         << " training_accuracy=" << FormatDouble(last.token_accuracy) << "\n";
  }
  return kExitOk;
}

int Pipeline::Extract() {
  Corpus corpus = LoadCorpus(o_.in);
  std::vector<AnnotatedReview> annotated;
  if (o_.mode == "gold") {
    if (o_.gold.empty()) throw Error("gold mode needs --gold <annotation file>");
    std::map<std::string, AnnotatedReview> by_id;
    for (auto &r : ReadAnnotations(o_.gold)) {
      std::string id = r.review.id;
      by_id.emplace(std::move(id), std::move(r));
    }
    for (const auto &review : corpus.reviews) {
      auto it = by_id.find(review.id);
      annotated.push_back(
          ExtractEntities(review, it == by_id.end() ? nullptr : &it->second));
      // The corpus is authoritative for app, text and labels.
      annotated.back().review = review;
    }
  } else {
    if (o_.model.empty()) throw Error("model mode needs --model <crf model>");
    if (o_.pos_model.empty()) throw MissingPos("model mode needs --pos-model");
    auto crf = CrfModel::Load(o_.model);
    auto pos = PosModel::Load(o_.pos_model);
    annotated = ExtractCorpus(corpus, pos, crf);
  }
  size_t spans = 0;
  for (const auto &r : annotated) spans += r.SpanCount();
  if (!o_.out.empty()) WriteAnnotations(annotated, o_.out);
  out_ << "reviews=" << annotated.size() << " spans=" << spans << "\n";
  return kExitOk;
}

int Pipeline::Build() {
  KnowledgeGraph fresh(Schema(), Aliases());
  const ConcernLexicon lexicon = Lexicon();
  size_t reviews = 0;
  for (const auto &path : o_.ann_files) {
    for (const auto &r : ReadAnnotations(path)) {
      LinkReview(fresh, r, lexicon);
      ++reviews;
    }
  }
  KnowledgeGraph graph = fresh;
  if (FileExists(o_.graph)) {
    Log("merging into existing " + o_.graph);
    graph = MergeGraphs(LoadGraph(o_.graph), fresh);
  }
  if (auto problems = graph.Violations(); !problems.empty()) {
    throw InvariantViolation(problems.front());
  }
  SaveGraph(graph, o_.graph);
  Log("linked " + std::to_string(reviews) + " reviews");
  const GraphStats s = revkg::Stats(graph);
  out_ << "nodes=" << s.nodes << " edges=" << s.edges << "\n";
  return kExitOk;
}

int Pipeline::Query() {
  const KnowledgeGraph graph = LoadGraph(o_.graph);
  QueryResult result;
  auto need = [](const std::string &value, const char *flag) {
    if (value.empty()) throw Error(std::string("this query needs ") + flag);
  };
  if (o_.query == "concerns") {
    need(o_.app, "--app");
    result = ConcernsOfApp(graph, o_.app);
  } else if (o_.query == "reasons") {
    need(o_.concern, "--concern");
    result = ReasonsForConcern(graph, o_.concern);
  } else if (o_.query == "requirements") {
    need(o_.concern, "--concern");
    result = RequirementsForConcern(graph, o_.concern);
  } else if (o_.query == "shared-issues") {
    result = SharedIssues(graph);
  } else if (o_.query == "shared-requirements") {
    result = SharedRequirements(graph);
  } else if (o_.query == "patterns") {
    result = ConcernPatternSummary(graph);
  } else {
    throw Error("unknown query '" + o_.query + "'; expected one of: " +
                Join(kQueryNames, ", "));
  }
  out_ << (o_.render == "jsonl" ? RenderJsonl(result) : RenderText(result));
  return kExitOk;
}

int Pipeline::Export() {
  auto format = ParseExportFormat(o_.format);
  if (!format) throw Error("unsupported export format '" + o_.format + "'");
  const KnowledgeGraph graph = LoadGraph(o_.graph);
  if (o_.out.empty()) {
    out_ << ExportGraph(graph, *format);
  } else {
    ExportGraph(graph, *format, o_.out);
    Log("wrote " + o_.out);
  }
  return kExitOk;
}

int Pipeline::Stats() {
  if (o_.graph.empty() == o_.in.empty()) throw Error("stats needs exactly one of --graph, --in");
  if (!o_.graph.empty()) {
    out_ << FormatStats(revkg::Stats(LoadGraph(o_.graph)));
  } else {
    out_ << FormatDistribution(ConcernDistribution(LoadCorpus(o_.in)));
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  Options o;
  CLI::App app{"Ethics-aware knowledge graph from app reviews", "revkg"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", o.global.seed, "Seed for shuffling and training");
  app.add_option("--schema", o.global.schema, "Ontology schema file")
      ->check(CLI::ExistingFile);
  app.add_option("--aliases", o.global.aliases, "Alias map (surface<TAB>canonical)")
      ->check(CLI::ExistingFile);
  app.add_option("--lexicon", o.global.lexicon, "Concern lexicon (surface<TAB>category)")
      ->check(CLI::ExistingFile);
  app.add_option("--taxonomy", o.global.taxonomy, "Concern vocabulary, one per line")
      ->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", o.global.verbose, "Progress on stderr");

  auto *ingest = app.add_subcommand("ingest", "Load, validate and filter reviews");
  ingest->add_option("--in", o.in, "Reviews (.jsonl or .csv)")->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--format", o.format, "auto, jsonl or csv")
      ->check(CLI::IsMember({"auto", "jsonl", "csv"}));
  ingest->add_option("--app", o.app, "Keep only this app");
  ingest->add_option("--out", o.out, "Normalized corpus output");
  ingest->add_flag("--stats", o.stats, "Print the concern distribution");

  auto *train = app.add_subcommand("train", "Train the POS tagger and/or the CRF");
  train->add_flag("--pos", o.pos, "Train the POS tagger");
  train->add_option("--pos-data", o.pos_data, "token<TAB>tag training file")
      ->check(CLI::ExistingFile);
  train->add_option("--pos-out", o.pos_out, "POS model output");
  train->add_option("--iterations", o.pos_iterations, "Perceptron passes");
  train->add_flag("--crf", o.crf, "Train the CRF entity tagger");
  train->add_option("--ann", o.ann, "Gold annotation file")->check(CLI::ExistingFile);
  train->add_option("--pos-model", o.pos_model, "POS model for untagged tokens")
      ->check(CLI::ExistingFile);
  train->add_option("--out", o.out, "CRF model output");
  train->add_option("--log", o.log, "Per-epoch CSV log");
  train->add_option("--epochs", o.crf_config.epochs, "Maximum epochs");
  train->add_option("--learning-rate", o.crf_config.learning_rate, "Initial step size");
  train->add_option("--l2", o.crf_config.l2, "L2 penalty");
  train->add_option("--batch-size", o.crf_config.batch_size, "Sentences per update");

  auto *extract = app.add_subcommand("extract", "Extract entity spans from reviews");
  extract->add_option("--in", o.in, "Reviews (.jsonl or .csv)")->required()
      ->check(CLI::ExistingFile);
  extract->add_option("--mode", o.mode, "gold or model")
      ->check(CLI::IsMember({"gold", "model"}));
  extract->add_option("--gold", o.gold, "Gold annotations (gold mode)")
      ->check(CLI::ExistingFile);
  extract->add_option("--model", o.model, "CRF model (model mode)")
      ->check(CLI::ExistingFile);
  extract->add_option("--pos-model", o.pos_model, "POS model (model mode)")
      ->check(CLI::ExistingFile);
  extract->add_option("--out", o.out, "Annotation output");

  auto *build = app.add_subcommand("build", "Link annotated reviews into the graph");
  build->add_option("--ann", o.ann_files, "Annotation files")->required()
      ->check(CLI::ExistingFile);
  build->add_option("--graph", o.graph, "Graph file; merged into when present")
      ->required();

  auto *query = app.add_subcommand("query", "Answer a competency question");
  query->add_option("name", o.query, Join(kQueryNames, " | "))->required();
  query->add_option("--graph", o.graph, "Graph file")->required()->check(CLI::ExistingFile);
  query->add_option("--app", o.app, "App name (concerns)");
  query->add_option("--concern", o.concern, "Concern label (reasons, requirements)");
  query->add_option("--format", o.render, "text or jsonl")
      ->check(CLI::IsMember({"text", "jsonl"}));

  auto *exp = app.add_subcommand("export", "Write the graph as cypher, graphml or dot");
  exp->add_option("--graph", o.graph, "Graph file")->required()->check(CLI::ExistingFile);
  exp->add_option("--format", o.format, "cypher, graphml or dot")->required();
  exp->add_option("--out", o.out, "Output file (default stdout)");

  auto *stats = app.add_subcommand("stats", "Graph or corpus statistics");
  stats->add_option("--graph", o.graph, "Graph file")->check(CLI::ExistingFile);
  stats->add_option("--in", o.in, "Reviews (.jsonl or .csv)")->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Pipeline p(o, out, err);
  try {
    if (*ingest) return p.Ingest();
    if (*train) return p.Train();
    if (*extract) return p.Extract();
    if (*build) return p.Build();
    if (*query) {
      if (std::find(kQueryNames.begin(), kQueryNames.end(), o.query) == kQueryNames.end()) {
        err << "error: unknown query '" << o.query << "'\n"
            << "queries: " << Join(kQueryNames, ", ") << "\n"
            << query->help();
        return kExitUsage;
      }
      return p.Query();
    }
    if (*exp) return p.Export();
    if (*stats) return p.Stats();
  } catch (const InvariantViolation &e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace revkg
