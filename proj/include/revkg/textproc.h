#ifndef REVKG_TEXTPROC_H_
#define REVKG_TEXTPROC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace revkg {

// Compact universal tagset.
enum class PosTag : uint8_t {
  kNoun, kVerb, kAdj, kAdv, kPron, kDet, kAdp, kNum, kConj, kPrt, kPunct, kX,
};
inline constexpr size_t kNumPosTags = 12;

std::string_view PosTagName(PosTag tag);
std::optional<PosTag> ParsePosTag(std::string_view name);

enum class ChunkTag : uint8_t { kBeginNp, kInsideNp, kBeginVp, kInsideVp, kOutside };

std::string_view ChunkTagName(ChunkTag tag);
std::optional<ChunkTag> ParseChunkTag(std::string_view name);

// A token with byte offsets into the text it was cut from.
struct Token {
  std::string text;
  size_t start = 0;  // inclusive
  size_t end = 0;    // exclusive
  std::optional<PosTag> pos;
  std::optional<ChunkTag> chunk;

  bool operator==(const Token &) const = default;
};

struct TextSpan {
  size_t start = 0;
  size_t end = 0;

  bool operator==(const TextSpan &) const = default;
};

// Abbreviations whose trailing period never ends a sentence (case-insensitive).
const std::vector<std::string> &SentenceAbbreviations();

// Terminators are . ! ? (runs allowed, closing brackets/quotes absorbed) when
// followed by whitespace or end of text. An abbreviation from the list above
// or a mid-text ellipsis does not terminate. Spans are whitespace-trimmed.
std::vector<TextSpan> SplitSentences(std::string_view text);

// Whitespace split, then brackets/quotes become separate tokens, leading and
// trailing punctuation is peeled off one character at a time (a run of dots
// stays whole), and a word is split in front of an interior apostrophe
// ("driver's" -> "driver" "'s"). Offsets are shifted by `base`.
std::vector<Token> Tokenize(std::string_view sentence, size_t base = 0);

// Longest-match chunking, left to right:
//   NP := DET? ADJ* (NOUN|PRON)+
//   VP := PRT? VERB+ ADV?
// Throws MissingPos if any token lacks a POS tag.
std::vector<Token> ChunkTokens(std::vector<Token> tokens);

// True if no I-x follows O or a chunk of a different type.
bool IsValidChunkChain(const std::vector<Token> &tokens);

}  // namespace revkg

#endif  // REVKG_TEXTPROC_H_
