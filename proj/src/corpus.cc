#include "revkg/corpus.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "revkg/error.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

using nlohmann::json;

std::string NormalizeName(std::string_view s) {
  return ToLower(CollapseWhitespace(s));
}

// One parsed record before validation.
struct RawRecord {
  size_t line = 0;
  std::optional<std::string> id;
  std::string app;
  std::string text;
  std::vector<std::string> labels;
};

std::vector<RawRecord> ParseJsonl(std::string_view contents) {
  std::vector<RawRecord> records;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= contents.size()) {
    size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (Trim(line).empty()) {
      if (end == contents.size()) break;
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error &e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "record is not an object");
    RawRecord rec;
    rec.line = line_no;
    try {
      if (obj.contains("id") && !obj["id"].is_null()) {
        rec.id = obj["id"].get<std::string>();
      }
      if (!obj.contains("app")) throw ParseError(line_no, "missing field 'app'");
      rec.app = obj["app"].get<std::string>();
      if (!obj.contains("text")) throw ParseError(line_no, "missing field 'text'");
      rec.text = obj["text"].get<std::string>();
      if (obj.contains("labels") && !obj["labels"].is_null()) {
        rec.labels = obj["labels"].get<std::vector<std::string>>();
      }
    } catch (const json::type_error &e) {
      throw ParseError(line_no, std::string("wrong field type: ") + e.what());
    }
    records.push_back(std::move(rec));
    if (end == contents.size()) break;
  }
  return records;
}

// RFC 4180 style: quoted fields may contain commas, doubled quotes and
// newlines. Returns rows with the 1-based line each row starts on.
std::vector<std::pair<size_t, std::vector<std::string>>> ParseCsvRows(
    std::string_view contents) {
  std::vector<std::pair<size_t, std::vector<std::string>>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1, row_line = 1;
  auto end_row = [&] {
    if (field_started || !row.empty()) {
      row.push_back(std::move(field));
      rows.emplace_back(row_line, std::move(row));
    }
    row.clear();
    field.clear();
    field_started = false;
  };
  for (size_t i = 0; i < contents.size(); ++i) {
    char c = contents[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < contents.size() && contents[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError(line, "stray quote in field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        row_line = line;
        break;
      default:
        if (!field_started && row.empty()) row_line = line;
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError(row_line, "unterminated quoted field");
  end_row();
  return rows;
}

std::vector<RawRecord> ParseCsv(std::string_view contents) {
  auto rows = ParseCsvRows(contents);
  if (rows.empty()) return {};
  const auto &header = rows.front().second;
  int id_col = -1, app_col = -1, text_col = -1, labels_col = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    std::string name = NormalizeName(header[c]);
    if (name == "id") id_col = static_cast<int>(c);
    else if (name == "app") app_col = static_cast<int>(c);
    else if (name == "text") text_col = static_cast<int>(c);
    else if (name == "labels") labels_col = static_cast<int>(c);
  }
  if (app_col < 0 || text_col < 0) {
    throw ParseError(rows.front().first, "header must name 'app' and 'text'");
  }
  std::vector<RawRecord> records;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto &[line, fields] = rows[r];
    if (fields.size() != header.size()) {
      throw ParseError(line, "expected " + std::to_string(header.size()) +
                                 " columns, got " +
                                 std::to_string(fields.size()));
    }
    RawRecord rec;
    rec.line = line;
    if (id_col >= 0 && !Trim(fields[id_col]).empty()) rec.id = fields[id_col];
    rec.app = fields[app_col];
    rec.text = fields[text_col];
    if (labels_col >= 0 && !Trim(fields[labels_col]).empty()) {
      for (auto &l : Split(fields[labels_col], '|')) rec.labels.push_back(l);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string CsvQuote(std::string_view s) {
  bool needs = s.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

ConcernVocabulary::ConcernVocabulary(std::vector<std::string> names) {
  for (auto &n : names) {
    std::string display = CollapseWhitespace(n);
    std::string key = ToLower(display);
    if (key.empty() || index_.count(key)) continue;
    index_.emplace(key, names_.size());
    names_.push_back(std::move(display));
  }
}

const ConcernVocabulary &ConcernVocabulary::Default() {
  static const ConcernVocabulary vocab({
      "Safety", "Accountability", "Scam", "Discrimination", "Transparency",
      "Privacy", "Accessibility", "Sustainability", "Identity Theft",
      "Cyberbullying/Toxicity", "Spreading False Information",
      "Inappropriate Content"});
  return vocab;
}

ConcernVocabulary ConcernVocabulary::Load(const std::string &path) {
  std::vector<std::string> names;
  std::istringstream in(ReadFile(path));
  std::string line;
  while (std::getline(in, line)) {
    auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    names.emplace_back(t);
  }
  if (names.empty()) throw ParseError(0, "taxonomy file is empty: " + path);
  return ConcernVocabulary(std::move(names));
}

std::optional<std::string> ConcernVocabulary::Canonicalize(
    std::string_view name) const {
  auto it = index_.find(NormalizeName(name));
  if (it == index_.end()) return std::nullopt;
  return names_[it->second];
}

CorpusFormat FormatFromPath(std::string_view path) {
  std::string lower = ToLower(path);
  if (lower.size() >= 4 && lower.compare(lower.size() - 4, 4, ".csv") == 0) {
    return CorpusFormat::kCsv;
  }
  return CorpusFormat::kJsonl;
}

Corpus ParseReviews(std::string_view contents, CorpusFormat format,
                    const ConcernVocabulary &vocab) {
  std::vector<RawRecord> records = format == CorpusFormat::kJsonl
                                       ? ParseJsonl(contents)
                                       : ParseCsv(contents);
  Corpus corpus;
  std::set<std::string> seen;
  size_t index = 0;
  for (auto &rec : records) {
    ++index;
    std::string app(Trim(rec.app));
    if (app.empty()) throw ParseError(rec.line, "empty app name");
    if (Trim(rec.text).empty()) throw ParseError(rec.line, "empty review text");
    Review review;
    review.id = rec.id ? *rec.id : app + "-" + std::to_string(index);
    if (Trim(review.id).empty()) throw ParseError(rec.line, "empty id");
    review.app = std::move(app);
    review.text = std::move(rec.text);
    for (const auto &label : rec.labels) {
      if (Trim(label).empty()) continue;
      auto canonical = vocab.Canonicalize(label);
      if (!canonical) {
        throw ParseError(rec.line, "unknown concern label '" + label + "'");
      }
      review.concern_labels.insert(*canonical);
    }
    if (!seen.insert(review.id).second) {
      throw DuplicateId("duplicate review id '" + review.id + "' (line " +
                        std::to_string(rec.line) + ")");
    }
    corpus.reviews.push_back(std::move(review));
  }
  return corpus;
}

Corpus LoadReviews(const std::string &path, CorpusFormat format,
                   const ConcernVocabulary &vocab) {
  return ParseReviews(ReadFile(path), format, vocab);
}

std::string SerializeReviews(const Corpus &corpus, CorpusFormat format) {
  std::string out;
  if (format == CorpusFormat::kJsonl) {
    for (const auto &r : corpus.reviews) {
      json obj = {{"id", r.id},
                  {"app", r.app},
                  {"text", r.text},
                  {"labels", std::vector<std::string>(r.concern_labels.begin(),
                                                      r.concern_labels.end())}};
      out += obj.dump();
      out.push_back('\n');
    }
    return out;
  }
  out = "id,app,text,labels\n";
  for (const auto &r : corpus.reviews) {
    std::vector<std::string> labels(r.concern_labels.begin(),
                                    r.concern_labels.end());
    out += CsvQuote(r.id) + "," + CsvQuote(r.app) + "," + CsvQuote(r.text) +
           "," + CsvQuote(Join(labels, "|")) + "\n";
  }
  return out;
}

void SaveReviews(const Corpus &corpus, const std::string &path,
                 CorpusFormat format) {
  WriteFile(path, SerializeReviews(corpus, format));
}

Corpus FilterByApp(const Corpus &corpus, std::string_view app) {
  Corpus out;
  std::string key = ToLower(Trim(app));
  for (const auto &r : corpus.reviews) {
    if (ToLower(Trim(r.app)) == key) out.reviews.push_back(r);
  }
  out.app_filter = std::string(Trim(app));
  return out;
}

const ConcernShare *DistributionReport::Find(std::string_view name) const {
  for (const auto &e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

DistributionReport ConcernDistribution(const Corpus &corpus) {
  std::map<std::string, size_t> counts;
  DistributionReport report;
  report.total_reviews = corpus.size();
  for (const auto &r : corpus.reviews) {
    if (!r.concern_labels.empty()) ++report.labeled_reviews;
    for (const auto &label : r.concern_labels) {
      ++counts[label];
      ++report.total_labels;
    }
  }
  if (report.total_labels == 0) {
    throw EmptyCorpus("no concern labels in corpus");
  }
  const double total = static_cast<double>(report.total_labels);
  const double reviews = static_cast<double>(report.total_reviews);
  for (const auto &[name, count] : counts) {
    report.entries.push_back(
        {name, count, count / total, count / reviews});
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const ConcernShare &a, const ConcernShare &b) {
              if (a.count != b.count) return a.count > b.count;
              return a.name < b.name;
            });
  return report;
}

std::string FormatDistribution(const DistributionReport &report) {
  size_t width = 7;
  for (const auto &e : report.entries) width = std::max(width, e.name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s %7s %9s %9s\n",
                static_cast<int>(width), "concern", "count", "%labels",
                "%reviews");
  out += buf;
  for (const auto &e : report.entries) {
    std::snprintf(buf, sizeof(buf), "%-*s %7zu %8.1f%% %8.1f%%\n",
                  static_cast<int>(width), e.name.c_str(), e.count,
                  100.0 * e.share, 100.0 * e.review_share);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf),
                "total_labels=%zu labeled_reviews=%zu total_reviews=%zu\n",
                report.total_labels, report.labeled_reviews,
                report.total_reviews);
  out += buf;
  return out;
}

}  // namespace revkg
