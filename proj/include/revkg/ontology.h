#ifndef REVKG_ONTOLOGY_H_
#define REVKG_ONTOLOGY_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revkg {

// Built-in entity type names.
inline constexpr std::string_view kApp = "App";
inline constexpr std::string_view kIssue = "Issue";
inline constexpr std::string_view kEthicalConcern = "EthicalConcern";
inline constexpr std::string_view kRequirement = "Requirement";

// Built-in relation names.
inline constexpr std::string_view kHaving = "HAVING";
inline constexpr std::string_view kRaises = "RAISES";
inline constexpr std::string_view kAddresses = "ADDRESSES";
inline constexpr std::string_view kHasIssue = "HAS_ISSUE";

struct OntEntityType {
  std::string name;
  std::string definition;

  bool operator==(const OntEntityType &) const = default;
};

struct RelationType {
  std::string name;
  std::string source;
  std::string target;

  bool operator==(const RelationType &) const = default;
};

struct TripleCheck {
  bool ok = false;
  std::string reason;  // empty when ok
};

// Entity and relation types the knowledge graph must respect. Entity names
// are unique and always include the four built-ins; each (name, source,
// target) relation appears once.
class OntologySchema {
 public:
  OntologySchema() = default;

  // App, Issue, EthicalConcern, Requirement plus HAVING (App->EthicalConcern),
  // RAISES (Issue->EthicalConcern), ADDRESSES (Requirement->EthicalConcern)
  // and HAS_ISSUE (App->Issue).
  static const OntologySchema &Default();

  // Text format, one declaration per line, tab separated:
  //   entity<TAB><name><TAB><definition>
  //   relation<TAB><name><TAB><source><TAB><target>
  // The file extends the default schema. A leading "base<TAB>none" line
  // keeps only the built-in entity types and drops the default relations.
  // Throws ParseError and DanglingEndpoint.
  static OntologySchema Parse(std::string_view text);
  static OntologySchema Load(const std::string &path);
  std::string Serialize() const;
  void Save(const std::string &path) const;

  // Adds or redefines an entity type.
  void AddEntityType(OntEntityType type);
  // Throws DanglingEndpoint when an endpoint is undeclared.
  void AddRelation(RelationType relation);

  bool HasEntityType(std::string_view name) const;
  bool HasRelation(std::string_view name) const;
  const OntEntityType *FindEntityType(std::string_view name) const;

  // True iff (source, relation, target) matches a declared relation.
  // Throws UnknownRelation for an undeclared relation name.
  TripleCheck ValidateTriple(std::string_view source, std::string_view relation,
                             std::string_view target) const;

  const std::vector<OntEntityType> &entity_types() const { return entity_types_; }
  const std::vector<RelationType> &relations() const { return relations_; }

  bool operator==(const OntologySchema &) const = default;

 private:
  std::vector<OntEntityType> entity_types_;
  std::vector<RelationType> relations_;
};

}  // namespace revkg

#endif  // REVKG_ONTOLOGY_H_
