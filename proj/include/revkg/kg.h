#ifndef REVKG_KG_H_
#define REVKG_KG_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "revkg/annotation.h"
#include "revkg/corpus.h"
#include "revkg/ontology.h"

namespace revkg {

// Normalized surface -> canonical label.
using AliasMap = std::map<std::string, std::string>;

// "surface<TAB>canonical" lines; both sides are normalized on load.
AliasMap ParseAliases(std::string_view text);
AliasMap LoadAliases(const std::string &path);

// Lowercase, trim, collapse whitespace, strip surrounding punctuation. May
// return an empty string.
std::string NormalizeLabel(std::string_view surface);

// NormalizeLabel followed by an exact alias lookup. Throws
// EmptyAfterNormalization.
std::string CanonicalizeLabel(std::string_view surface, const AliasMap &aliases);

// Stable id derived from (type, canonical label).
std::string NodeId(std::string_view type, std::string_view canonical_label);

// Maps concern phrases ("unsafe", "security") to vocabulary categories.
class ConcernLexicon {
 public:
  ConcernLexicon() = default;

  // Every vocabulary name maps to itself, plus a few common phrasings.
  static ConcernLexicon Default(
      const ConcernVocabulary &vocab = ConcernVocabulary::Default());
  // "surface<TAB>category" lines on top of the vocabulary names. Unknown
  // categories are a ParseError.
  static ConcernLexicon Parse(std::string_view text,
                              const ConcernVocabulary &vocab = ConcernVocabulary::Default());
  static ConcernLexicon Load(const std::string &path,
                             const ConcernVocabulary &vocab = ConcernVocabulary::Default());

  void Add(std::string_view surface, std::string category);

  // Exact match on the normalized phrase first, otherwise the longest entry
  // that occurs in the phrase on word boundaries.
  std::optional<std::string> Resolve(std::string_view phrase) const;

  const std::map<std::string, std::string> &entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct Node {
  std::string id;
  std::string type;
  std::string label;  // smallest surface seen, so merges are order independent
  std::string canonical_label;
  std::set<std::string> provenance;
  // EthicalConcern created from raw span text because no category resolved.
  bool uncategorized = false;

  bool operator==(const Node &) const = default;
};

using EdgeKey = std::tuple<std::string, std::string, std::string>;  // src, rel, dst

struct Edge {
  std::string source;
  std::string relation;
  std::string target;
  std::set<std::string> provenance;

  EdgeKey key() const { return {source, relation, target}; }
  bool operator==(const Edge &) const = default;
};

struct GraphStats {
  size_t nodes = 0;
  size_t edges = 0;
  std::map<std::string, size_t> nodes_by_type;
  std::map<std::string, size_t> edges_by_relation;
  size_t requirements = 0;

  bool operator==(const GraphStats &) const = default;
};

// Typed property graph with deduplicated nodes (identity = type + canonical
// label) and collapsed edges (identity = source, relation, target). Every
// mutation keeps referential integrity and schema validity.
class KnowledgeGraph {
 public:
  explicit KnowledgeGraph(OntologySchema schema = OntologySchema::Default(),
                          AliasMap aliases = {});

  // Creates the node or adds `review_id` to its provenance. Throws
  // EmptyAfterNormalization and SchemaViolation (undeclared type).
  std::string UpsertNode(std::string_view type, std::string_view label,
                         const std::string &review_id, bool uncategorized = false);

  // Throws IntegrityError for missing endpoints, SchemaViolation for a
  // triple the schema rejects.
  EdgeKey AddEdge(const std::string &source, std::string_view relation,
                  const std::string &target, const std::string &review_id);

  const Node *FindNode(const std::string &id) const;
  const Node *FindNode(std::string_view type, std::string_view label) const;
  const Edge *FindEdge(const EdgeKey &key) const;

  const std::map<std::string, Node> &nodes() const { return nodes_; }
  const std::map<EdgeKey, Edge> &edges() const { return edges_; }
  const OntologySchema &schema() const { return schema_; }
  const AliasMap &aliases() const { return aliases_; }

  // Descriptions of every broken invariant; empty when the graph is sound.
  std::vector<std::string> Violations() const;

  bool operator==(const KnowledgeGraph &) const = default;

 private:
  friend KnowledgeGraph MergeGraphs(const KnowledgeGraph &, const KnowledgeGraph &);
  friend KnowledgeGraph ParseGraph(std::string_view);

  void MergeNode(const Node &node);
  void MergeEdge(const Edge &edge);

  OntologySchema schema_;
  AliasMap aliases_;
  std::map<std::string, Node> nodes_;
  std::map<EdgeKey, Edge> edges_;
};

struct LinkResult {
  std::vector<std::string> nodes;
  std::vector<EdgeKey> edges;
};

// Review-scope linking: App node, HAVING to each concern, HAS_ISSUE and
// RAISES for issues, ADDRESSES for requirements. A concern span resolves via
// the lexicon, else to all review-level labels, else to its own text
// (flagged uncategorized).
LinkResult LinkReview(KnowledgeGraph &graph, const AnnotatedReview &review,
                      const ConcernLexicon &lexicon);

// Union under node/edge identity with provenance union. Throws
// SchemaMismatch when schema or alias map differ.
KnowledgeGraph MergeGraphs(const KnowledgeGraph &base, const KnowledgeGraph &increment);

GraphStats Stats(const KnowledgeGraph &graph);
std::string FormatStats(const GraphStats &stats);

// Versioned text format: [schema], [aliases], [nodes], [edges] sections.
std::string SerializeGraph(const KnowledgeGraph &graph);
// Throws ParseError and IntegrityError.
KnowledgeGraph ParseGraph(std::string_view text);
void SaveGraph(const KnowledgeGraph &graph, const std::string &path);
KnowledgeGraph LoadGraph(const std::string &path);

enum class ExportFormat { kCypher, kGraphml, kDot };

std::optional<ExportFormat> ParseExportFormat(std::string_view name);
std::string ExportGraph(const KnowledgeGraph &graph, ExportFormat format);
void ExportGraph(const KnowledgeGraph &graph, ExportFormat format,
                 const std::string &path);

}  // namespace revkg

#endif  // REVKG_KG_H_
