#include "revkg/ontology.h"

#include "revkg/error.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

OntologySchema BuiltinTypes() {
  OntologySchema schema;
  schema.AddEntityType({std::string(kApp), "Name of the application (e.g. Uber)"});
  schema.AddEntityType({std::string(kIssue),
                        "An issue faced by users that is the underlying reason "
                        "for an ethical concern"});
  schema.AddEntityType({std::string(kEthicalConcern),
                        "An ethical concern reported in app reviews"});
  schema.AddEntityType({std::string(kRequirement),
                        "A feature or functionality suggested by users that "
                        "might address ethical concerns"});
  return schema;
}

}  // namespace

const OntologySchema &OntologySchema::Default() {
  static const OntologySchema schema = [] {
    OntologySchema s = BuiltinTypes();
    s.AddRelation({std::string(kHaving), std::string(kApp), std::string(kEthicalConcern)});
    s.AddRelation({std::string(kRaises), std::string(kIssue), std::string(kEthicalConcern)});
    s.AddRelation({std::string(kAddresses), std::string(kRequirement),
                   std::string(kEthicalConcern)});
    s.AddRelation({std::string(kHasIssue), std::string(kApp), std::string(kIssue)});
    return s;
  }();
  return schema;
}

void OntologySchema::AddEntityType(OntEntityType type) {
  for (auto &existing : entity_types_) {
    if (existing.name == type.name) {
      existing.definition = std::move(type.definition);
      return;
    }
  }
  entity_types_.push_back(std::move(type));
}

void OntologySchema::AddRelation(RelationType relation) {
  for (const auto *endpoint : {&relation.source, &relation.target}) {
    if (!HasEntityType(*endpoint)) {
      throw DanglingEndpoint("relation " + relation.name +
                             " references undeclared entity type '" + *endpoint + "'");
    }
  }
  for (const auto &existing : relations_) {
    if (existing == relation) return;
  }
  relations_.push_back(std::move(relation));
}

bool OntologySchema::HasEntityType(std::string_view name) const {
  return FindEntityType(name) != nullptr;
}

bool OntologySchema::HasRelation(std::string_view name) const {
  for (const auto &r : relations_) {
    if (r.name == name) return true;
  }
  return false;
}

const OntEntityType *OntologySchema::FindEntityType(std::string_view name) const {
  for (const auto &t : entity_types_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

TripleCheck OntologySchema::ValidateTriple(std::string_view source,
                                           std::string_view relation,
                                           std::string_view target) const {
  bool known = false, source_ok = false, target_ok = false;
  for (const auto &r : relations_) {
    if (r.name != relation) continue;
    known = true;
    if (r.source == source && r.target == target) return {true, {}};
    source_ok |= r.source == source;
    target_ok |= r.target == target;
  }
  if (!known) throw UnknownRelation("unknown relation '" + std::string(relation) + "'");
  if (source_ok) return {false, "target mismatch"};
  if (target_ok) return {false, "source mismatch"};
  return {false, "source and target mismatch"};
}

OntologySchema OntologySchema::Parse(std::string_view text) {
  OntologySchema schema = Default();
  size_t line_no = 0;
  bool first_declaration = true;
  for (const auto &raw : Split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    auto fields = Split(line, '\t');
    for (auto &f : fields) f = std::string(Trim(f));
    if (fields[0] == "base") {
      if (!first_declaration || fields.size() != 2 ||
          (fields[1] != "none" && fields[1] != "default")) {
        throw ParseError(line_no, "'base' must come first and be 'none' or 'default'");
      }
      if (fields[1] == "none") schema = BuiltinTypes();
    } else if (fields[0] == "entity") {
      if (fields.size() < 2 || fields.size() > 3 || fields[1].empty()) {
        throw ParseError(line_no, "expected 'entity<TAB>name<TAB>definition'");
      }
      schema.AddEntityType({fields[1], fields.size() == 3 ? fields[2] : ""});
    } else if (fields[0] == "relation") {
      if (fields.size() != 4 || fields[1].empty()) {
        throw ParseError(line_no, "expected 'relation<TAB>name<TAB>source<TAB>target'");
      }
      try {
        schema.AddRelation({fields[1], fields[2], fields[3]});
      } catch (const DanglingEndpoint &e) {
        throw DanglingEndpoint("line " + std::to_string(line_no) + ": " + e.what());
      }
    } else {
      throw ParseError(line_no, "unknown declaration '" + fields[0] + "'");
    }
    first_declaration = false;
  }
  return schema;
}

OntologySchema OntologySchema::Load(const std::string &path) {
  return Parse(ReadFile(path));
}

std::string OntologySchema::Serialize() const {
  std::string out = "base\tnone\n";
  for (const auto &t : entity_types_) {
    out += "entity\t" + t.name + "\t" + t.definition + "\n";
  }
  for (const auto &r : relations_) {
    out += "relation\t" + r.name + "\t" + r.source + "\t" + r.target + "\n";
  }
  return out;
}

void OntologySchema::Save(const std::string &path) const {
  WriteFile(path, Serialize());
}

}  // namespace revkg
