#ifndef REVKG_ANNOTATION_H_
#define REVKG_ANNOTATION_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "revkg/corpus.h"
#include "revkg/textproc.h"

namespace revkg {

// Text-borne entity kinds. App entities come from review metadata and are
// never span-annotated.
enum class EntityKind : uint8_t { kConcern, kIssue, kRequirement };

std::string_view EntityKindCode(EntityKind kind);  // "EC", "I", "R"

// Fixed order; the numeric value is the tag index used by the CRF.
enum class BioTag : uint8_t {
  kO, kBeginEc, kInsideEc, kBeginI, kInsideI, kBeginR, kInsideR,
};
inline constexpr size_t kNumBioTags = 7;

std::string_view BioTagName(BioTag tag);
std::optional<BioTag> ParseBioTag(std::string_view name);
BioTag BeginTag(EntityKind kind);
BioTag InsideTag(EntityKind kind);
std::optional<EntityKind> KindOf(BioTag tag);
bool IsBegin(BioTag tag);
bool IsInside(BioTag tag);

// Token-index span [start, end) within one sentence.
struct EntitySpan {
  EntityKind kind = EntityKind::kConcern;
  size_t start = 0;
  size_t end = 0;
  std::string surface;

  bool operator==(const EntitySpan &) const = default;
};

// Throws OutOfBounds for empty or out-of-range spans and OverlapError when
// two spans share a token.
std::vector<BioTag> SpansToBio(const std::vector<EntitySpan> &spans,
                               size_t length);

// Lenient decode: maximal B-x I-x* runs become spans, and an I-x that does
// not continue a run of the same kind opens a new one. `words`, when given,
// fills each span's surface with the space-joined token texts.
std::vector<EntitySpan> BioToSpans(const std::vector<BioTag> &tags,
                                   const std::vector<std::string> *words = nullptr);
std::vector<EntitySpan> BioToSpans(const std::vector<BioTag> &tags,
                                   const std::vector<Token> &tokens);

// Rewrites chain-invalid I-x tags to B-x so the sequence validates.
std::vector<BioTag> RepairBio(std::vector<BioTag> tags);

struct BioViolation {
  size_t index = 0;
  std::string message;
};

struct BioValidation {
  std::vector<BioViolation> violations;
  bool valid() const { return violations.empty(); }
};

BioValidation ValidateBio(const std::vector<BioTag> &tags);

struct AnnotatedSentence {
  std::vector<Token> tokens;
  std::vector<BioTag> tags;

  std::vector<EntitySpan> Spans() const { return BioToSpans(tags, tokens); }
  bool operator==(const AnnotatedSentence &) const = default;
};

enum class Provenance { kGold, kPredicted };

struct AnnotatedReview {
  Review review;
  std::vector<AnnotatedSentence> sentences;
  Provenance provenance = Provenance::kGold;

  size_t SpanCount() const;
  bool operator==(const AnnotatedReview &) const = default;
};

// Annotation file, UTF-8:
//   #review <id> <app>
//   #labels <label>|<label>        optional
//   #provenance predicted          optional, default gold
//   #text <escaped review text>    optional
//   token<TAB>tag                  or token<TAB>pos<TAB>chunk<TAB>tag
//   <blank line ends a sentence>
// Gold reviews are validated strictly; predicted ones are repaired.
std::vector<AnnotatedReview> ParseAnnotations(std::string_view contents);
std::vector<AnnotatedReview> ReadAnnotations(const std::string &path);
std::string SerializeAnnotations(const std::vector<AnnotatedReview> &reviews);
void WriteAnnotations(const std::vector<AnnotatedReview> &reviews,
                      const std::string &path);

// Splits review text into sentences and tokens with review-relative offsets.
std::vector<std::vector<Token>> SegmentReview(std::string_view text);

// Builds a gold annotation by locating each phrase (case-insensitive, token
// aligned, first non-overlapping occurrence). Throws MissingAnnotation when a
// phrase cannot be placed inside a single sentence.
AnnotatedReview AnnotateByPhrases(
    const Review &review,
    const std::vector<std::pair<EntityKind, std::string>> &phrases);

}  // namespace revkg

#endif  // REVKG_ANNOTATION_H_
