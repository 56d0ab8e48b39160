#include "revkg/annotation.h"

#include "revkg/error.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

constexpr std::array<std::string_view, kNumBioTags> kBioNames = {
    "O", "B-EC", "I-EC", "B-I", "I-I", "B-R", "I-R"};

std::string JoinTokens(const std::vector<Token> &tokens, size_t b, size_t e) {
  std::string out;
  for (size_t i = b; i < e; ++i) {
    if (i > b) out.push_back(' ');
    out += tokens[i].text;
  }
  return out;
}

// Token offsets are recovered by scanning the review text left to right.
// Returns false when a token is not found in order.
bool AssignOffsets(const std::string &text, std::vector<AnnotatedSentence> &sentences) {
  size_t cursor = 0;
  for (auto &s : sentences) {
    for (auto &t : s.tokens) {
      size_t pos = text.find(t.text, cursor);
      if (pos == std::string::npos) return false;
      t.start = pos;
      t.end = pos + t.text.size();
      cursor = t.end;
    }
  }
  return true;
}

}  // namespace

std::string_view EntityKindCode(EntityKind kind) {
  switch (kind) {
    case EntityKind::kConcern: return "EC";
    case EntityKind::kIssue: return "I";
    case EntityKind::kRequirement: return "R";
  }
  return "?";
}

std::string_view BioTagName(BioTag tag) {
  return kBioNames[static_cast<size_t>(tag)];
}

std::optional<BioTag> ParseBioTag(std::string_view name) {
  for (size_t i = 0; i < kBioNames.size(); ++i) {
    if (kBioNames[i] == name) return static_cast<BioTag>(i);
  }
  return std::nullopt;
}

BioTag BeginTag(EntityKind kind) {
  return static_cast<BioTag>(1 + 2 * static_cast<int>(kind));
}

BioTag InsideTag(EntityKind kind) {
  return static_cast<BioTag>(2 + 2 * static_cast<int>(kind));
}

std::optional<EntityKind> KindOf(BioTag tag) {
  if (tag == BioTag::kO) return std::nullopt;
  return static_cast<EntityKind>((static_cast<int>(tag) - 1) / 2);
}

bool IsBegin(BioTag tag) {
  return tag != BioTag::kO && static_cast<int>(tag) % 2 == 1;
}

bool IsInside(BioTag tag) {
  return tag != BioTag::kO && static_cast<int>(tag) % 2 == 0;
}

std::vector<BioTag> SpansToBio(const std::vector<EntitySpan> &spans,
                               size_t length) {
  std::vector<BioTag> tags(length, BioTag::kO);
  std::vector<bool> used(length, false);
  for (const auto &s : spans) {
    if (s.start >= s.end || s.end > length) {
      throw OutOfBounds("span [" + std::to_string(s.start) + "," +
                        std::to_string(s.end) + ") outside sentence of length " +
                        std::to_string(length));
    }
    for (size_t i = s.start; i < s.end; ++i) {
      if (used[i]) {
        throw OverlapError("spans overlap at token " + std::to_string(i));
      }
      used[i] = true;
      tags[i] = i == s.start ? BeginTag(s.kind) : InsideTag(s.kind);
    }
  }
  return tags;
}

std::vector<EntitySpan> BioToSpans(const std::vector<BioTag> &tags,
                                   const std::vector<std::string> *words) {
  std::vector<EntitySpan> spans;
  size_t i = 0;
  while (i < tags.size()) {
    auto kind = KindOf(tags[i]);
    if (!kind) {
      ++i;
      continue;
    }
    // Either a B-x or an orphan I-x opens a span; same-kind I-x extend it.
    size_t j = i + 1;
    while (j < tags.size() && tags[j] == InsideTag(*kind)) ++j;
    EntitySpan span{*kind, i, j, {}};
    if (words != nullptr) {
      for (size_t k = i; k < j; ++k) {
        if (k > i) span.surface.push_back(' ');
        span.surface += (*words)[k];
      }
    }
    spans.push_back(std::move(span));
    i = j;
  }
  return spans;
}

std::vector<EntitySpan> BioToSpans(const std::vector<BioTag> &tags,
                                   const std::vector<Token> &tokens) {
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const auto &t : tokens) words.push_back(t.text);
  return BioToSpans(tags, &words);
}

std::vector<BioTag> RepairBio(std::vector<BioTag> tags) {
  for (size_t i = 0; i < tags.size(); ++i) {
    if (!IsInside(tags[i])) continue;
    BioTag prev = i == 0 ? BioTag::kO : tags[i - 1];
    if (KindOf(prev) != KindOf(tags[i])) tags[i] = BeginTag(*KindOf(tags[i]));
  }
  return tags;
}

BioValidation ValidateBio(const std::vector<BioTag> &tags) {
  BioValidation report;
  for (size_t i = 0; i < tags.size(); ++i) {
    if (!IsInside(tags[i])) continue;
    BioTag prev = i == 0 ? BioTag::kO : tags[i - 1];
    if (prev == BioTag::kO) {
      report.violations.push_back(
          {i, std::string(BioTagName(tags[i])) + " follows O"});
    } else if (KindOf(prev) != KindOf(tags[i])) {
      report.violations.push_back({i, std::string(BioTagName(tags[i])) +
                                          " follows " +
                                          std::string(BioTagName(prev))});
    }
  }
  return report;
}

size_t AnnotatedReview::SpanCount() const {
  size_t n = 0;
  for (const auto &s : sentences) n += s.Spans().size();
  return n;
}

std::vector<AnnotatedReview> ParseAnnotations(std::string_view contents) {
  std::vector<AnnotatedReview> reviews;
  std::vector<size_t> review_lines;
  std::vector<bool> has_text;
  AnnotatedSentence current;
  size_t current_line = 0;
  auto flush = [&](size_t line_no) {
    if (current.tokens.empty()) return;
    if (reviews.empty()) throw ParseError(line_no, "token before '#review' header");
    auto &r = reviews.back();
    if (r.provenance == Provenance::kGold) {
      auto check = ValidateBio(current.tags);
      if (!check.valid()) {
        throw ParseError(current_line + check.violations[0].index,
                         "invalid BIO chain: " + check.violations[0].message);
      }
    } else {
      current.tags = RepairBio(std::move(current.tags));
    }
    r.sentences.push_back(std::move(current));
    current = {};
  };

  size_t line_no = 0;
  for (const auto &raw : Split(contents, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty()) {
      flush(line_no);
      continue;
    }
    if (line.front() == '#' && line.find('\t') == std::string_view::npos) {
      flush(line_no);
      if (line.rfind("#review ", 0) == 0) {
        auto rest = Trim(line.substr(8));
        size_t sp = 0;
        while (sp < rest.size() && rest[sp] != ' ') sp += rest[sp] == '\\' ? 2 : 1;
        if (sp >= rest.size()) sp = std::string_view::npos;
        if (sp == std::string_view::npos || Trim(rest.substr(sp)).empty()) {
          throw ParseError(line_no, "expected '#review <id> <app>'");
        }
        AnnotatedReview r;
        r.review.id = UnescapeField(rest.substr(0, sp));
        r.review.app = std::string(Trim(rest.substr(sp)));
        reviews.push_back(std::move(r));
        review_lines.push_back(line_no);
        has_text.push_back(false);
        continue;
      }
      if (reviews.empty()) throw ParseError(line_no, "directive before '#review'");
      auto &r = reviews.back();
      if (line.rfind("#labels ", 0) == 0) {
        for (auto &l : Split(Trim(line.substr(8)), '|')) {
          auto canonical = ConcernVocabulary::Default().Canonicalize(l);
          r.review.concern_labels.insert(canonical ? *canonical : std::string(Trim(l)));
        }
      } else if (line.rfind("#provenance ", 0) == 0) {
        auto value = Trim(line.substr(12));
        if (value == "gold") r.provenance = Provenance::kGold;
        else if (value == "predicted") r.provenance = Provenance::kPredicted;
        else throw ParseError(line_no, "unknown provenance '" + std::string(value) + "'");
      } else if (line.rfind("#text ", 0) == 0) {
        r.review.text = UnescapeField(line.substr(6));
        has_text.back() = true;
      } else {
        throw ParseError(line_no, "unknown directive");
      }
      continue;
    }
    auto fields = Split(line, '\t');
    if (fields.size() != 2 && fields.size() != 4) {
      throw ParseError(line_no, "expected 2 or 4 tab-separated columns");
    }
    if (fields[0].empty()) throw ParseError(line_no, "empty token");
    auto tag = ParseBioTag(fields.back());
    if (!tag) throw InvalidTag(line_no, "unknown BIO tag '" + fields.back() + "'");
    Token token;
    token.text = fields[0];
    if (fields.size() == 4) {
      token.pos = ParsePosTag(fields[1]);
      if (!token.pos) throw InvalidTag(line_no, "unknown POS tag '" + fields[1] + "'");
      token.chunk = ParseChunkTag(fields[2]);
      if (!token.chunk) throw InvalidTag(line_no, "unknown chunk tag '" + fields[2] + "'");
    }
    if (current.tokens.empty()) current_line = line_no;
    current.tokens.push_back(std::move(token));
    current.tags.push_back(*tag);
  }
  flush(line_no);

  for (size_t i = 0; i < reviews.size(); ++i) {
    auto &r = reviews[i];
    if (!has_text[i]) {
      std::vector<std::string> words;
      for (const auto &s : r.sentences) {
        for (const auto &t : s.tokens) words.push_back(t.text);
      }
      r.review.text = Join(words, " ");
    }
    if (!AssignOffsets(r.review.text, r.sentences)) {
      throw ParseError(review_lines[i], "tokens do not match review text");
    }
  }
  return reviews;
}

std::vector<AnnotatedReview> ReadAnnotations(const std::string &path) {
  return ParseAnnotations(ReadFile(path));
}

std::string SerializeAnnotations(const std::vector<AnnotatedReview> &reviews) {
  std::string out;
  for (const auto &r : reviews) {
    out += "#review " + EscapeField(r.review.id, ' ') + " " + r.review.app + "\n";
    if (!r.review.concern_labels.empty()) {
      std::vector<std::string> labels(r.review.concern_labels.begin(),
                                      r.review.concern_labels.end());
      out += "#labels " + Join(labels, "|") + "\n";
    }
    if (r.provenance == Provenance::kPredicted) out += "#provenance predicted\n";
    out += "#text " + EscapeField(r.review.text) + "\n";
    for (const auto &s : r.sentences) {
      bool tagged = true;
      for (const auto &t : s.tokens) tagged &= t.pos.has_value() && t.chunk.has_value();
      for (size_t i = 0; i < s.tokens.size(); ++i) {
        const auto &t = s.tokens[i];
        out += t.text;
        out.push_back('\t');
        if (tagged) {
          out += PosTagName(*t.pos);
          out.push_back('\t');
          out += ChunkTagName(*t.chunk);
          out.push_back('\t');
        }
        out += BioTagName(s.tags[i]);
        out.push_back('\n');
      }
      out.push_back('\n');
    }
  }
  return out;
}

void WriteAnnotations(const std::vector<AnnotatedReview> &reviews,
                      const std::string &path) {
  WriteFile(path, SerializeAnnotations(reviews));
}

std::vector<std::vector<Token>> SegmentReview(std::string_view text) {
  std::vector<std::vector<Token>> sentences;
  for (const auto &span : SplitSentences(text)) {
    auto tokens = Tokenize(text.substr(span.start, span.end - span.start), span.start);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  return sentences;
}

AnnotatedReview AnnotateByPhrases(
    const Review &review,
    const std::vector<std::pair<EntityKind, std::string>> &phrases) {
  AnnotatedReview out;
  out.review = review;
  out.provenance = Provenance::kGold;
  std::vector<std::vector<EntitySpan>> spans;
  for (auto &tokens : SegmentReview(review.text)) {
    out.sentences.push_back({std::move(tokens), {}});
    spans.emplace_back();
  }
  for (const auto &[kind, phrase] : phrases) {
    auto needle = Tokenize(phrase);
    if (needle.empty()) throw MissingAnnotation("empty phrase");
    bool placed = false;
    for (size_t s = 0; s < out.sentences.size() && !placed; ++s) {
      const auto &tokens = out.sentences[s].tokens;
      for (size_t i = 0; i + needle.size() <= tokens.size() && !placed; ++i) {
        bool match = true;
        for (size_t k = 0; k < needle.size() && match; ++k) {
          match = ToLower(tokens[i + k].text) == ToLower(needle[k].text);
        }
        if (!match) continue;
        bool overlaps = false;
        for (const auto &other : spans[s]) {
          overlaps |= i < other.end && other.start < i + needle.size();
        }
        if (overlaps) continue;
        spans[s].push_back({kind, i, i + needle.size(),
                            JoinTokens(tokens, i, i + needle.size())});
        placed = true;
      }
    }
    if (!placed) {
      throw MissingAnnotation("phrase '" + phrase + "' not found in review " +
                              review.id);
    }
  }
  for (size_t s = 0; s < out.sentences.size(); ++s) {
    out.sentences[s].tags = SpansToBio(spans[s], out.sentences[s].tokens.size());
  }
  return out;
}

}  // namespace revkg
