#include "revkg/query.h"

#include <algorithm>
#include <map>

#include "json.hpp"

#include "revkg/error.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

void SortRows(std::vector<QueryRow> &rows) {
  std::sort(rows.begin(), rows.end(), [](const QueryRow &a, const QueryRow &b) {
    if (a.support.size() != b.support.size()) return a.support.size() > b.support.size();
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.subject_id < b.subject_id;
  });
}

QueryRow RowFor(const Node &node) {
  QueryRow row;
  row.subject_id = node.id;
  row.subject = node.label;
  return row;
}

const Node &FindConcern(const KnowledgeGraph &graph, const std::string &concern) {
  const Node *node = nullptr;
  try {
    node = graph.FindNode(kEthicalConcern, concern);
  } catch (const EmptyAfterNormalization &) {
  }
  if (node == nullptr) throw UnknownConcern("no concern named '" + concern + "'");
  return *node;
}

// Sources of `relation` edges into `target`, each with the edge provenance.
QueryResult Incoming(const KnowledgeGraph &graph, const Node &target,
                     std::string_view relation, std::string name) {
  QueryResult result;
  result.name = std::move(name);
  result.params = {{"concern", target.label}};
  for (const auto &[key, edge] : graph.edges()) {
    if (edge.relation != relation || edge.target != target.id) continue;
    QueryRow row = RowFor(*graph.FindNode(edge.source));
    row.support = edge.provenance;
    result.rows.push_back(std::move(row));
  }
  SortRows(result.rows);
  return result;
}

QueryResult Shared(const KnowledgeGraph &graph, std::string_view type,
                   std::string_view relation, std::string name) {
  std::map<std::string, QueryRow> rows;
  std::map<std::string, std::vector<const Node *>> targets;
  for (const auto &[key, edge] : graph.edges()) {
    if (edge.relation != relation) continue;
    const Node &source = *graph.FindNode(edge.source);
    if (source.type != type) continue;
    auto [it, fresh] = rows.try_emplace(source.id, RowFor(source));
    targets[source.id].push_back(graph.FindNode(edge.target));
    it->second.support.insert(edge.provenance.begin(), edge.provenance.end());
  }
  QueryResult result;
  result.name = std::move(name);
  for (auto &[id, row] : rows) {
    auto &concerns = targets[id];
    if (concerns.size() < 2) continue;
    // Most widely supported concern first.
    std::sort(concerns.begin(), concerns.end(), [](const Node *a, const Node *b) {
      if (a->provenance.size() != b->provenance.size()) {
        return a->provenance.size() > b->provenance.size();
      }
      return a->label != b->label ? a->label < b->label : a->id < b->id;
    });
    for (const Node *c : concerns) row.related.push_back(c->label);
    result.rows.push_back(std::move(row));
  }
  SortRows(result.rows);
  return result;
}

std::string Pad(const std::string &s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::vector<std::string> QueryResult::Subjects() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto &r : rows) out.push_back(r.subject);
  return out;
}

QueryResult ConcernsOfApp(const KnowledgeGraph &graph, const std::string &app) {
  const Node *app_node = nullptr;
  try {
    app_node = graph.FindNode(kApp, app);
  } catch (const EmptyAfterNormalization &) {
  }
  if (app_node == nullptr) throw UnknownApp("no app named '" + app + "'");
  QueryResult result;
  result.name = "concerns_of_app";
  result.params = {{"app", app_node->label}};
  for (const auto &[key, edge] : graph.edges()) {
    if (edge.relation != kHaving || edge.source != app_node->id) continue;
    const Node &concern = *graph.FindNode(edge.target);
    if (concern.type != kEthicalConcern) continue;
    QueryRow row = RowFor(concern);
    row.support = edge.provenance;
    result.rows.push_back(std::move(row));
  }
  SortRows(result.rows);
  return result;
}

QueryResult ReasonsForConcern(const KnowledgeGraph &graph, const std::string &concern) {
  return Incoming(graph, FindConcern(graph, concern), kRaises, "reasons_for_concern");
}

QueryResult RequirementsForConcern(const KnowledgeGraph &graph,
                                   const std::string &concern) {
  return Incoming(graph, FindConcern(graph, concern), kAddresses,
                  "requirements_for_concern");
}

QueryResult SharedIssues(const KnowledgeGraph &graph) {
  return Shared(graph, kIssue, kRaises, "shared_issues");
}

QueryResult SharedRequirements(const KnowledgeGraph &graph) {
  return Shared(graph, kRequirement, kAddresses, "shared_requirements");
}

QueryResult ConcernPatternSummary(const KnowledgeGraph &graph) {
  std::map<std::string, QueryRow> rows;
  for (const auto &[id, node] : graph.nodes()) {
    if (node.type != kEthicalConcern) continue;
    QueryRow row = RowFor(node);
    row.counts = {0, 0};
    row.support = node.provenance;
    rows.emplace(id, std::move(row));
  }
  for (const auto &[key, edge] : graph.edges()) {
    auto it = rows.find(edge.target);
    if (it == rows.end()) continue;
    if (edge.relation == kRaises) ++it->second.counts[0];
    if (edge.relation == kAddresses) ++it->second.counts[1];
  }
  QueryResult result;
  result.name = "concern_pattern_summary";
  result.count_columns = {"issues", "requirements"};
  for (auto &[id, row] : rows) result.rows.push_back(std::move(row));
  SortRows(result.rows);
  return result;
}

std::string RenderText(const QueryResult &result) {
  std::string out = "# " + result.name;
  for (const auto &[k, v] : result.params) out += " " + k + "=" + v;
  out += "\n";
  size_t width = 0;
  for (const auto &row : result.rows) width = std::max(width, row.subject.size() + 1);
  for (const auto &row : result.rows) {
    std::string line = Pad(row.subject + ":", width);
    if (!row.related.empty()) line += " " + Join(row.related, ", ");
    for (size_t i = 0; i < row.counts.size(); ++i) {
      std::string col = i < result.count_columns.size() ? result.count_columns[i] : "count";
      line += " " + col + "=" + std::to_string(row.counts[i]);
    }
    line += "  [" + Join({row.support.begin(), row.support.end()}, ", ") + "]";
    out += line + "\n";
  }
  if (result.rows.empty()) out += "(no rows)\n";
  return out;
}

std::string RenderJsonl(const QueryResult &result) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto &[k, v] : result.params) params[k] = v;
  std::string out;
  for (const auto &row : result.rows) {
    nlohmann::ordered_json j;
    j["query"] = result.name;
    j["params"] = params;
    j["id"] = row.subject_id;
    j["subject"] = row.subject;
    j["related"] = row.related;
    for (size_t i = 0; i < row.counts.size(); ++i) {
      j[i < result.count_columns.size() ? result.count_columns[i] : "count"] = row.counts[i];
    }
    j["support"] = std::vector<std::string>(row.support.begin(), row.support.end());
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace revkg
