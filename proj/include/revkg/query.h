#ifndef REVKG_QUERY_H_
#define REVKG_QUERY_H_

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "revkg/kg.h"

namespace revkg {

struct QueryRow {
  std::string subject_id;
  std::string subject;               // display label
  std::vector<std::string> related;  // display labels, most supported first
  std::vector<size_t> counts;        // query-specific numeric columns
  std::set<std::string> support;     // review ids

  bool operator==(const QueryRow &) const = default;
};

struct QueryResult {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> count_columns;
  // Ordered by descending support size, then subject label, then id.
  std::vector<QueryRow> rows;

  std::vector<std::string> Subjects() const;
  bool operator==(const QueryResult &) const = default;
};

// EthicalConcern nodes reached by App -HAVING->. Throws UnknownApp.
QueryResult ConcernsOfApp(const KnowledgeGraph &graph, const std::string &app);
// Issue nodes with Issue -RAISES-> concern. Throws UnknownConcern.
QueryResult ReasonsForConcern(const KnowledgeGraph &graph, const std::string &concern);
// Requirement nodes with Requirement -ADDRESSES-> concern. Throws
// UnknownConcern.
QueryResult RequirementsForConcern(const KnowledgeGraph &graph,
                                   const std::string &concern);
// Issues raising two or more concerns, with the concern labels.
QueryResult SharedIssues(const KnowledgeGraph &graph);
// Requirements addressing two or more concerns, with the concern labels.
QueryResult SharedRequirements(const KnowledgeGraph &graph);
// One row per concern: counts = {#issues raising, #requirements addressing}.
QueryResult ConcernPatternSummary(const KnowledgeGraph &graph);

// Aligned columns, one row per line: "subject: related..." style.
std::string RenderText(const QueryResult &result);
// One JSON object per row with query name and parameters.
std::string RenderJsonl(const QueryResult &result);

}  // namespace revkg

#endif  // REVKG_QUERY_H_
