#include "revkg/kg.h"

#include <algorithm>
#include <cstdio>

#include "revkg/error.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

constexpr std::string_view kGraphHeader = "revkg-graph 1";

// Display label for a surface: itself unless an alias rewrote it, in which
// case the alias target reads better than the misspelling.
std::string DisplayLabel(std::string_view surface, const std::string &canonical) {
  std::string collapsed = CollapseWhitespace(surface);
  if (NormalizeLabel(collapsed) == canonical) return collapsed;
  return canonical;
}

std::vector<std::string> ParseTsvLines(std::string_view text, size_t columns,
                                       std::vector<size_t> *line_numbers) {
  std::vector<std::string> fields;
  size_t line_no = 0;
  for (const auto &raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    auto parts = SplitEscaped(line, '\t');
    if (parts.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) +
                                    " tab-separated fields");
    }
    for (auto &p : parts) fields.push_back(std::move(p));
    line_numbers->push_back(line_no);
  }
  return fields;
}

bool WordBoundaryFind(const std::string &haystack, const std::string &needle) {
  size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    const size_t end = pos + needle.size();
    const bool left = pos == 0 || haystack[pos - 1] == ' ';
    const bool right = end == haystack.size() || haystack[end] == ' ';
    if (left && right) return true;
    ++pos;
  }
  return false;
}

std::string JoinProvenance(const std::set<std::string> &ids, char sep) {
  std::string out;
  for (const auto &id : ids) {
    if (!out.empty()) out += sep;
    out += EscapeField(id, sep);
  }
  return out;
}

std::set<std::string> SplitProvenance(std::string_view field, char sep) {
  std::set<std::string> out;
  if (field.empty()) return out;
  for (auto &id : SplitEscaped(field, sep)) out.insert(std::move(id));
  return out;
}

}  // namespace

AliasMap ParseAliases(std::string_view text) {
  std::vector<size_t> lines;
  auto fields = ParseTsvLines(text, 2, &lines);
  AliasMap aliases;
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string surface = NormalizeLabel(fields[2 * i]);
    std::string canonical = NormalizeLabel(fields[2 * i + 1]);
    if (surface.empty() || canonical.empty()) {
      throw ParseError(lines[i], "alias sides must be nonempty after normalization");
    }
    if (surface != canonical) aliases[surface] = canonical;
  }
  return aliases;
}

AliasMap LoadAliases(const std::string &path) { return ParseAliases(ReadFile(path)); }

std::string NormalizeLabel(std::string_view surface) {
  std::string s = CollapseWhitespace(ToLower(surface));
  size_t b = 0, e = s.size();
  while (b < e && IsPunct(s[b])) ++b;
  while (e > b && IsPunct(s[e - 1])) --e;
  return CollapseWhitespace(std::string_view(s).substr(b, e - b));
}

std::string CanonicalizeLabel(std::string_view surface, const AliasMap &aliases) {
  std::string norm = NormalizeLabel(surface);
  if (norm.empty()) {
    throw EmptyAfterNormalization("label '" + std::string(surface) +
                                  "' is empty after normalization");
  }
  auto it = aliases.find(norm);
  return it == aliases.end() ? norm : it->second;
}

std::string NodeId(std::string_view type, std::string_view canonical_label) {
  std::string key(type);
  key += '\x1f';
  key += canonical_label;
  char buf[20];
  std::snprintf(buf, sizeof buf, "n%016llx",
                static_cast<unsigned long long>(Fnv1a64(key)));
  return buf;
}

// ---------------------------------------------------------------------------
// ConcernLexicon

ConcernLexicon ConcernLexicon::Default(const ConcernVocabulary &vocab) {
  ConcernLexicon lex;
  for (const auto &name : vocab.names()) lex.Add(name, name);
  // Common phrasings in ride-hailing reviews. Added only when the target
  // category is part of the vocabulary.
  static const std::pair<const char *, const char *> kPhrases[] = {
      {"unsafe", "Safety"},
      {"safe", "Safety"},
      {"security", "Safety"},
      {"dangerous", "Safety"},
      {"harassment", "Safety"},
      {"accountable", "Accountability"},
      {"responsibility", "Accountability"},
      {"scam", "Scam"},
      {"fraud", "Scam"},
      {"cheated", "Scam"},
      {"overcharged", "Scam"},
      {"discrimination", "Discrimination"},
      {"racist", "Discrimination"},
      {"transparent", "Transparency"},
      {"hidden charges", "Transparency"},
      {"privacy", "Privacy"},
      {"personal data", "Privacy"},
      {"accessible", "Accessibility"},
      {"wheelchair", "Accessibility"},
      {"service dog", "Accessibility"},
      {"environment", "Sustainability"},
      {"identity theft", "Identity Theft"},
      {"toxic", "Cyberbullying/Toxicity"},
      {"bullying", "Cyberbullying/Toxicity"},
      {"misleading", "Spreading False Information"},
      {"false information", "Spreading False Information"},
      {"inappropriate", "Inappropriate Content"},
  };
  for (const auto &[surface, category] : kPhrases) {
    if (auto name = vocab.Canonicalize(category)) lex.Add(surface, *name);
  }
  return lex;
}

ConcernLexicon ConcernLexicon::Parse(std::string_view text,
                                     const ConcernVocabulary &vocab) {
  ConcernLexicon lex;
  for (const auto &name : vocab.names()) lex.Add(name, name);
  std::vector<size_t> lines;
  auto fields = ParseTsvLines(text, 2, &lines);
  for (size_t i = 0; i < lines.size(); ++i) {
    auto category = vocab.Canonicalize(Trim(fields[2 * i + 1]));
    if (!category) {
      throw ParseError(lines[i], "unknown concern category '" + fields[2 * i + 1] + "'");
    }
    if (NormalizeLabel(fields[2 * i]).empty()) {
      throw ParseError(lines[i], "empty lexicon surface");
    }
    lex.Add(fields[2 * i], *category);
  }
  return lex;
}

ConcernLexicon ConcernLexicon::Load(const std::string &path,
                                    const ConcernVocabulary &vocab) {
  return Parse(ReadFile(path), vocab);
}

void ConcernLexicon::Add(std::string_view surface, std::string category) {
  std::string key = NormalizeLabel(surface);
  if (!key.empty()) entries_[key] = std::move(category);
}

std::optional<std::string> ConcernLexicon::Resolve(std::string_view phrase) const {
  const std::string norm = NormalizeLabel(phrase);
  if (norm.empty()) return std::nullopt;
  if (auto it = entries_.find(norm); it != entries_.end()) return it->second;
  // Longest key wins; ties go to the smallest key (map order).
  const std::string *best = nullptr, *best_key = nullptr;
  for (const auto &[key, category] : entries_) {
    if (best_key != nullptr && key.size() <= best_key->size()) continue;
    if (WordBoundaryFind(norm, key)) {
      best = &category;
      best_key = &key;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

// ---------------------------------------------------------------------------
// KnowledgeGraph

KnowledgeGraph::KnowledgeGraph(OntologySchema schema, AliasMap aliases)
    : schema_(std::move(schema)), aliases_(std::move(aliases)) {}

std::string KnowledgeGraph::UpsertNode(std::string_view type, std::string_view label,
                                       const std::string &review_id,
                                       bool uncategorized) {
  std::string canonical = CanonicalizeLabel(label, aliases_);
  if (!schema_.HasEntityType(type)) {
    throw SchemaViolation("entity type '" + std::string(type) + "' is not in the schema");
  }
  Node node;
  node.type = std::string(type);
  node.id = NodeId(type, canonical);
  node.label = DisplayLabel(label, canonical);
  node.canonical_label = std::move(canonical);
  node.provenance.insert(review_id);
  node.uncategorized = uncategorized;
  std::string id = node.id;
  MergeNode(node);
  return id;
}

void KnowledgeGraph::MergeNode(const Node &node) {
  auto [it, inserted] = nodes_.try_emplace(node.id, node);
  if (inserted) return;
  Node &existing = it->second;
  if (existing.type != node.type || existing.canonical_label != node.canonical_label) {
    throw InvariantViolation("node id collision between '" + existing.canonical_label +
                             "' and '" + node.canonical_label + "'");
  }
  existing.provenance.insert(node.provenance.begin(), node.provenance.end());
  existing.label = std::min(existing.label, node.label);
  existing.uncategorized = existing.uncategorized && node.uncategorized;
}

void KnowledgeGraph::MergeEdge(const Edge &edge) {
  auto [it, inserted] = edges_.try_emplace(edge.key(), edge);
  if (!inserted) {
    it->second.provenance.insert(edge.provenance.begin(), edge.provenance.end());
  }
}

EdgeKey KnowledgeGraph::AddEdge(const std::string &source, std::string_view relation,
                                const std::string &target, const std::string &review_id) {
  const Node *s = FindNode(source);
  const Node *t = FindNode(target);
  if (s == nullptr || t == nullptr) {
    throw IntegrityError("edge " + std::string(relation) + " references missing node " +
                         (s == nullptr ? source : target));
  }
  TripleCheck check;
  try {
    check = schema_.ValidateTriple(s->type, relation, t->type);
  } catch (const UnknownRelation &e) {
    throw SchemaViolation(e.what());
  }
  if (!check.ok) {
    throw SchemaViolation(s->type + " -" + std::string(relation) + "-> " + t->type + ": " +
                          check.reason);
  }
  Edge edge{source, std::string(relation), target, {review_id}};
  EdgeKey key = edge.key();
  MergeEdge(edge);
  return key;
}

const Node *KnowledgeGraph::FindNode(const std::string &id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Node *KnowledgeGraph::FindNode(std::string_view type, std::string_view label) const {
  std::string canonical = NormalizeLabel(label);
  if (canonical.empty()) return nullptr;
  if (auto it = aliases_.find(canonical); it != aliases_.end()) canonical = it->second;
  return FindNode(NodeId(type, canonical));
}

const Edge *KnowledgeGraph::FindEdge(const EdgeKey &key) const {
  auto it = edges_.find(key);
  return it == edges_.end() ? nullptr : &it->second;
}

std::vector<std::string> KnowledgeGraph::Violations() const {
  std::vector<std::string> out;
  std::set<std::pair<std::string, std::string>> identities;
  for (const auto &[id, node] : nodes_) {
    if (id != node.id) out.push_back("node keyed " + id + " carries id " + node.id);
    if (node.id != NodeId(node.type, node.canonical_label)) {
      out.push_back("node " + node.id + ": id does not match (type, canonical label)");
    }
    std::string expected;
    try {
      expected = CanonicalizeLabel(node.label, aliases_);
    } catch (const EmptyAfterNormalization &) {
    }
    if (expected != node.canonical_label) {
      out.push_back("node " + node.id + ": label does not canonicalize to '" +
                    node.canonical_label + "'");
    }
    if (node.provenance.empty()) out.push_back("node " + node.id + ": empty provenance");
    if (!schema_.HasEntityType(node.type)) {
      out.push_back("node " + node.id + ": undeclared type " + node.type);
    }
    if (!identities.insert({node.type, node.canonical_label}).second) {
      out.push_back("duplicate node (" + node.type + ", " + node.canonical_label + ")");
    }
  }
  for (const auto &[key, edge] : edges_) {
    const std::string name =
        edge.source + " -" + edge.relation + "-> " + edge.target;
    if (key != edge.key()) out.push_back("edge " + name + " stored under a different key");
    const Node *s = FindNode(edge.source);
    const Node *t = FindNode(edge.target);
    if (s == nullptr || t == nullptr) {
      out.push_back("dangling edge " + name);
      continue;
    }
    if (edge.provenance.empty()) out.push_back("edge " + name + ": empty provenance");
    if (!schema_.HasRelation(edge.relation)) {
      out.push_back("edge " + name + ": unknown relation");
    } else if (auto check = schema_.ValidateTriple(s->type, edge.relation, t->type);
               !check.ok) {
      out.push_back("edge " + name + ": " + check.reason);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linking, merging, statistics

LinkResult LinkReview(KnowledgeGraph &graph, const AnnotatedReview &annotated,
                      const ConcernLexicon &lexicon) {
  const Review &review = annotated.review;
  if (Trim(review.app).empty()) throw SchemaViolation("review " + review.id + " has no app");
  LinkResult result;
  auto note_node = [&](const std::string &id) {
    if (std::find(result.nodes.begin(), result.nodes.end(), id) == result.nodes.end()) {
      result.nodes.push_back(id);
    }
  };
  auto note_edge = [&](const EdgeKey &key) {
    if (std::find(result.edges.begin(), result.edges.end(), key) == result.edges.end()) {
      result.edges.push_back(key);
    }
  };

  const std::string app = graph.UpsertNode(kApp, review.app, review.id);
  note_node(app);

  std::vector<EntitySpan> spans;
  for (const auto &sentence : annotated.sentences) {
    for (auto &span : sentence.Spans()) spans.push_back(std::move(span));
  }

  std::vector<std::string> concerns;
  auto add_concern = [&](std::string_view label, bool uncategorized) {
    std::string id = graph.UpsertNode(kEthicalConcern, label, review.id, uncategorized);
    note_node(id);
    if (std::find(concerns.begin(), concerns.end(), id) == concerns.end()) {
      concerns.push_back(id);
    }
  };
  for (const auto &span : spans) {
    if (span.kind != EntityKind::kConcern) continue;
    if (auto category = lexicon.Resolve(span.surface)) {
      add_concern(*category, false);
    } else if (!review.concern_labels.empty()) {
      for (const auto &label : review.concern_labels) add_concern(label, false);
    } else {
      add_concern(span.surface, true);
    }
  }
  for (const auto &c : concerns) note_edge(graph.AddEdge(app, kHaving, c, review.id));

  for (const auto &span : spans) {
    if (span.kind == EntityKind::kIssue) {
      std::string issue = graph.UpsertNode(kIssue, span.surface, review.id);
      note_node(issue);
      note_edge(graph.AddEdge(app, kHasIssue, issue, review.id));
      for (const auto &c : concerns) note_edge(graph.AddEdge(issue, kRaises, c, review.id));
    } else if (span.kind == EntityKind::kRequirement) {
      std::string req = graph.UpsertNode(kRequirement, span.surface, review.id);
      note_node(req);
      for (const auto &c : concerns) {
        note_edge(graph.AddEdge(req, kAddresses, c, review.id));
      }
    }
  }
  return result;
}

KnowledgeGraph MergeGraphs(const KnowledgeGraph &base, const KnowledgeGraph &increment) {
  if (!(base.schema_ == increment.schema_)) {
    throw SchemaMismatch("graphs were built against different schemas");
  }
  if (base.aliases_ != increment.aliases_) {
    throw SchemaMismatch("graphs were built with different alias maps");
  }
  KnowledgeGraph out = base;
  for (const auto &[id, node] : increment.nodes_) out.MergeNode(node);
  for (const auto &[key, edge] : increment.edges_) {
    if (out.FindNode(edge.source) == nullptr || out.FindNode(edge.target) == nullptr) {
      throw IntegrityError("increment has a dangling edge");
    }
    out.MergeEdge(edge);
  }
  return out;
}

GraphStats Stats(const KnowledgeGraph &graph) {
  GraphStats s;
  s.nodes = graph.nodes().size();
  s.edges = graph.edges().size();
  for (const auto &[id, node] : graph.nodes()) ++s.nodes_by_type[node.type];
  for (const auto &[key, edge] : graph.edges()) ++s.edges_by_relation[edge.relation];
  if (auto it = s.nodes_by_type.find(std::string(kRequirement));
      it != s.nodes_by_type.end()) {
    s.requirements = it->second;
  }
  return s;
}

std::string FormatStats(const GraphStats &stats) {
  std::string out = "nodes=" + std::to_string(stats.nodes) +
                    " edges=" + std::to_string(stats.edges) + "\n";
  for (const auto &[type, n] : stats.nodes_by_type) {
    out += "  " + type + "\t" + std::to_string(n) + "\n";
  }
  for (const auto &[rel, n] : stats.edges_by_relation) {
    out += "  " + rel + "\t" + std::to_string(n) + "\n";
  }
  out += "requirements=" + std::to_string(stats.requirements) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

std::string SerializeGraph(const KnowledgeGraph &graph) {
  std::string out(kGraphHeader);
  out += "\n[schema]\n";
  for (const auto &t : graph.schema().entity_types()) {
    out += "entity\t" + EscapeField(t.name) + "\t" + EscapeField(t.definition) + "\n";
  }
  for (const auto &r : graph.schema().relations()) {
    out += "relation\t" + EscapeField(r.name) + "\t" + EscapeField(r.source) + "\t" +
           EscapeField(r.target) + "\n";
  }
  out += "[aliases]\n";
  for (const auto &[surface, canonical] : graph.aliases()) {
    out += EscapeField(surface) + "\t" + EscapeField(canonical) + "\n";
  }
  out += "[nodes]\n";
  for (const auto &[id, n] : graph.nodes()) {
    out += EscapeField(n.id) + "\t" + EscapeField(n.type) + "\t" + EscapeField(n.label) +
           "\t" + EscapeField(n.canonical_label) + "\t" +
           (n.uncategorized ? "uncategorized" : "-") + "\t" +
           JoinProvenance(n.provenance, ',') + "\n";
  }
  out += "[edges]\n";
  for (const auto &[key, e] : graph.edges()) {
    out += EscapeField(e.source) + "\t" + EscapeField(e.relation) + "\t" +
           EscapeField(e.target) + "\t" + JoinProvenance(e.provenance, ',') + "\n";
  }
  return out;
}

KnowledgeGraph ParseGraph(std::string_view text) {
  auto lines = Split(text, '\n');
  if (lines.empty() || Trim(lines[0]) != kGraphHeader) {
    throw ParseError(1, "missing '" + std::string(kGraphHeader) + "' header");
  }
  enum class Section { kNone, kSchema, kAliases, kNodes, kEdges } section = Section::kNone;
  OntologySchema schema;
  KnowledgeGraph graph;
  std::vector<std::pair<size_t, Node>> nodes;
  std::vector<std::pair<size_t, Edge>> edges;
  bool seen_schema = false;

  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line == "[schema]") { section = Section::kSchema; seen_schema = true; continue; }
    if (line == "[aliases]") { section = Section::kAliases; continue; }
    if (line == "[nodes]") { section = Section::kNodes; continue; }
    if (line == "[edges]") { section = Section::kEdges; continue; }
    auto f = SplitEscaped(line, '\t');
    switch (section) {
      case Section::kNone:
        throw ParseError(line_no, "content before the first section");
      case Section::kSchema:
        if (f[0] == "entity" && f.size() == 3) {
          schema.AddEntityType({f[1], f[2]});
        } else if (f[0] == "relation" && f.size() == 4) {
          try {
            schema.AddRelation({f[1], f[2], f[3]});
          } catch (const DanglingEndpoint &e) {
            throw ParseError(line_no, e.what());
          }
        } else {
          throw ParseError(line_no, "bad schema line");
        }
        break;
      case Section::kAliases:
        if (f.size() != 2) throw ParseError(line_no, "alias lines have 2 fields");
        graph.aliases_[f[0]] = f[1];
        break;
      case Section::kNodes: {
        if (f.size() != 6) throw ParseError(line_no, "node lines have 6 fields");
        if (f[4] != "-" && f[4] != "uncategorized") {
          throw ParseError(line_no, "bad node flag '" + f[4] + "'");
        }
        Node n{f[0], f[1], f[2], f[3], SplitProvenance(f[5], ','), f[4] == "uncategorized"};
        nodes.emplace_back(line_no, std::move(n));
        break;
      }
      case Section::kEdges: {
        if (f.size() != 4) throw ParseError(line_no, "edge lines have 4 fields");
        edges.emplace_back(line_no, Edge{f[0], f[1], f[2], SplitProvenance(f[3], ',')});
        break;
      }
    }
  }
  if (!seen_schema) throw ParseError(lines.size(), "missing [schema] section");
  graph.schema_ = std::move(schema);

  auto where = [](size_t line_no) { return "line " + std::to_string(line_no) + ": "; };
  for (auto &[line_no, node] : nodes) {
    if (graph.nodes_.count(node.id)) {
      throw IntegrityError(where(line_no) + "duplicate node " + node.id);
    }
    graph.nodes_.emplace(node.id, std::move(node));
  }
  for (auto &[line_no, edge] : edges) {
    if (graph.FindNode(edge.source) == nullptr || graph.FindNode(edge.target) == nullptr) {
      throw IntegrityError(where(line_no) + "edge references a missing node");
    }
    if (graph.edges_.count(edge.key())) {
      throw IntegrityError(where(line_no) + "duplicate edge");
    }
    graph.edges_.emplace(edge.key(), std::move(edge));
  }
  if (auto problems = graph.Violations(); !problems.empty()) {
    throw IntegrityError(problems.front());
  }
  return graph;
}

void SaveGraph(const KnowledgeGraph &graph, const std::string &path) {
  WriteFile(path, SerializeGraph(graph));
}

KnowledgeGraph LoadGraph(const std::string &path) { return ParseGraph(ReadFile(path)); }

// ---------------------------------------------------------------------------
// Export

namespace {

std::string CypherString(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "'";
}

std::string CypherName(std::string_view s) {
  std::string out = "`";
  for (char c : s) {
    out += c;
    if (c == '`') out += '`';
  }
  return out + "`";
}

std::string CypherList(const std::set<std::string> &items) {
  std::string out = "[";
  for (const auto &s : items) {
    if (out.size() > 1) out += ", ";
    out += CypherString(s);
  }
  return out + "]";
}

std::string CypherMatchKey(const Node &n) {
  return CypherName(n.type) + " {canonical_label: " + CypherString(n.canonical_label) + "}";
}

std::string ExportCypher(const KnowledgeGraph &g) {
  std::string out;
  for (const auto &[id, n] : g.nodes()) {
    out += "MERGE (n:" + CypherMatchKey(n) + ") SET n.id = " + CypherString(n.id) +
           ", n.label = " + CypherString(n.label) +
           ", n.provenance = " + CypherList(n.provenance) +
           ", n.uncategorized = " + (n.uncategorized ? "true" : "false") + ";\n";
  }
  for (const auto &[key, e] : g.edges()) {
    const Node &s = *g.FindNode(e.source);
    const Node &t = *g.FindNode(e.target);
    out += "MATCH (a:" + CypherMatchKey(s) + "), (b:" + CypherMatchKey(t) +
           ") MERGE (a)-[r:" + CypherName(e.relation) +
           "]->(b) SET r.provenance = " + CypherList(e.provenance) + ";\n";
  }
  return out;
}

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string ExportGraphml(const KnowledgeGraph &g) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"type\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n"
      "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      "  <key id=\"canonical_label\" for=\"node\" attr.name=\"canonical_label\" "
      "attr.type=\"string\"/>\n"
      "  <key id=\"uncategorized\" for=\"node\" attr.name=\"uncategorized\" "
      "attr.type=\"boolean\"/>\n"
      "  <key id=\"relation\" for=\"edge\" attr.name=\"relation\" attr.type=\"string\"/>\n"
      "  <key id=\"provenance\" for=\"all\" attr.name=\"provenance\" "
      "attr.type=\"string\"/>\n"
      "  <graph id=\"kg\" edgedefault=\"directed\">\n";
  auto data = [](std::string_view key, std::string_view value) {
    return "      <data key=\"" + std::string(key) + "\">" + XmlEscape(value) + "</data>\n";
  };
  for (const auto &[id, n] : g.nodes()) {
    out += "    <node id=\"" + XmlEscape(n.id) + "\">\n";
    out += data("type", n.type) + data("label", n.label) +
           data("canonical_label", n.canonical_label) +
           data("uncategorized", n.uncategorized ? "true" : "false") +
           data("provenance", JoinProvenance(n.provenance, '|'));
    out += "    </node>\n";
  }
  size_t k = 0;
  for (const auto &[key, e] : g.edges()) {
    out += "    <edge id=\"e" + std::to_string(k++) + "\" source=\"" + XmlEscape(e.source) +
           "\" target=\"" + XmlEscape(e.target) + "\">\n";
    out += data("relation", e.relation) + data("provenance", JoinProvenance(e.provenance, '|'));
    out += "    </edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

std::string DotString(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string ExportDot(const KnowledgeGraph &g) {
  std::string out = "digraph kg {\n  rankdir=LR;\n  node [style=filled];\n";
  for (const auto &[id, n] : g.nodes()) {
    std::string style;
    if (n.type == kApp) {
      style = "shape=box, fillcolor=\"lightblue\"";
    } else if (n.type == kEthicalConcern) {
      style = "shape=ellipse, fillcolor=\"orange\"";
    } else if (n.type == kIssue) {
      style = "shape=ellipse, fillcolor=\"pink\"";
    } else if (n.type == kRequirement) {
      style = "shape=ellipse, fillcolor=\"palegreen\"";
    } else {
      style = "shape=ellipse, fillcolor=\"white\"";
    }
    out += "  " + DotString(n.id) + " [label=" + DotString(n.label) + ", type=" +
           DotString(n.type) + ", " + style + "];\n";
  }
  for (const auto &[key, e] : g.edges()) {
    std::string color = "black";
    if (e.relation == kRaises) color = "red";
    if (e.relation == kAddresses) color = "green";
    out += "  " + DotString(e.source) + " -> " + DotString(e.target) +
           " [label=" + DotString(e.relation) + ", color=" + color + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace

std::optional<ExportFormat> ParseExportFormat(std::string_view name) {
  const std::string n = ToLower(name);
  if (n == "cypher") return ExportFormat::kCypher;
  if (n == "graphml") return ExportFormat::kGraphml;
  if (n == "dot") return ExportFormat::kDot;
  return std::nullopt;
}

std::string ExportGraph(const KnowledgeGraph &graph, ExportFormat format) {
  switch (format) {
    case ExportFormat::kCypher: return ExportCypher(graph);
    case ExportFormat::kGraphml: return ExportGraphml(graph);
    case ExportFormat::kDot: return ExportDot(graph);
  }
  throw Error("unknown export format");
}

void ExportGraph(const KnowledgeGraph &graph, ExportFormat format,
                 const std::string &path) {
  WriteFile(path, ExportGraph(graph, format));
}

}  // namespace revkg
