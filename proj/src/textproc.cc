#include "revkg/textproc.h"

#include <algorithm>

#include "revkg/error.h"
#include "revkg/text_util.h"

namespace revkg {
namespace {

Token Plain(std::string text, size_t start, size_t end) {
  Token t;
  t.text = std::move(text);
  t.start = start;
  t.end = end;
  return t;
}

constexpr std::array<std::string_view, kNumPosTags> kPosNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET",
    "ADP",  "NUM",  "CONJ", "PRT", "PUNCT", "X"};

constexpr std::array<std::string_view, 5> kChunkNames = {"B-NP", "I-NP", "B-VP",
                                                         "I-VP", "O"};

bool IsTerminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool IsCloser(char c) { return c == ')' || c == ']' || c == '"' || c == '\''; }
bool IsBracketOrQuote(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' ||
         c == '}' || c == '"';
}

bool IsAbbreviation(std::string_view word) {
  std::string lower = ToLower(word);
  for (const auto &a : SentenceAbbreviations()) {
    if (lower == a) return true;
  }
  return false;
}

// Word ending at `dot` (inclusive), with leading punctuation removed.
std::string_view WordEndingAt(std::string_view text, size_t dot) {
  size_t b = dot;
  while (b > 0 && !IsSpace(text[b - 1])) --b;
  while (b < dot && IsPunct(text[b]) && text[b] != '.') ++b;
  return text.substr(b, dot + 1 - b);
}

// Position of an interior apostrophe (ASCII or U+2019) in [b, e), or npos.
// Returns the byte length of the apostrophe through `len`.
size_t FindInteriorApostrophe(std::string_view s, size_t b, size_t e,
                              size_t &len) {
  for (size_t i = b + 1; i < e; ++i) {
    if (s[i] == '\'' && i + 1 < e) {
      len = 1;
      return i;
    }
    if (i + 3 < e && s.compare(i, 3, "\xE2\x80\x99") == 0) {
      len = 3;
      return i;
    }
  }
  return std::string_view::npos;
}

void EmitWord(std::string_view s, size_t b, size_t e, size_t base,
              std::vector<Token> &out) {
  // Leading punctuation, one character each.
  while (b < e && IsPunct(s[b])) {
    out.push_back(Plain(std::string(1, s[b]), base + b, base + b + 1));
    ++b;
  }
  if (b == e) return;
  // Trailing punctuation; dot runs stay together, abbreviations keep their dot.
  std::vector<Token> trailing;
  while (e > b && IsPunct(s[e - 1])) {
    if (s[e - 1] == '.') {
      size_t d = e;
      while (d > b && s[d - 1] == '.') --d;
      if (e - d == 1 && d > b && IsAbbreviation(s.substr(b, e - b))) break;
      trailing.push_back(Plain(std::string(s.substr(d, e - d)), base + d, base + e));
      e = d;
      continue;
    }
    trailing.push_back(Plain(std::string(1, s[e - 1]), base + e - 1, base + e));
    --e;
  }
  if (b < e) {
    size_t apos_len = 0;
    size_t apos = FindInteriorApostrophe(s, b, e, apos_len);
    if (apos != std::string_view::npos) {
      out.push_back(Plain(std::string(s.substr(b, apos - b)), base + b, base + apos));
      out.push_back(Plain(std::string(s.substr(apos, e - apos)), base + apos, base + e));
    } else {
      out.push_back(Plain(std::string(s.substr(b, e - b)), base + b, base + e));
    }
  }
  std::reverse(trailing.begin(), trailing.end());
  for (auto &t : trailing) out.push_back(std::move(t));
}

bool Is(const Token &t, PosTag tag) { return t.pos && *t.pos == tag; }

size_t MatchNp(const std::vector<Token> &tokens, size_t i) {
  size_t j = i;
  if (j < tokens.size() && Is(tokens[j], PosTag::kDet)) ++j;
  while (j < tokens.size() && Is(tokens[j], PosTag::kAdj)) ++j;
  size_t heads = j;
  while (j < tokens.size() &&
         (Is(tokens[j], PosTag::kNoun) || Is(tokens[j], PosTag::kPron))) {
    ++j;
  }
  return j > heads ? j - i : 0;
}

size_t MatchVp(const std::vector<Token> &tokens, size_t i) {
  size_t j = i;
  if (j < tokens.size() && Is(tokens[j], PosTag::kPrt)) ++j;
  size_t verbs = j;
  while (j < tokens.size() && Is(tokens[j], PosTag::kVerb)) ++j;
  if (j == verbs) return 0;
  if (j < tokens.size() && Is(tokens[j], PosTag::kAdv)) ++j;
  return j - i;
}

}  // namespace

std::string_view PosTagName(PosTag tag) {
  return kPosNames[static_cast<size_t>(tag)];
}

std::optional<PosTag> ParsePosTag(std::string_view name) {
  for (size_t i = 0; i < kPosNames.size(); ++i) {
    if (kPosNames[i] == name) return static_cast<PosTag>(i);
  }
  return std::nullopt;
}

std::string_view ChunkTagName(ChunkTag tag) {
  return kChunkNames[static_cast<size_t>(tag)];
}

std::optional<ChunkTag> ParseChunkTag(std::string_view name) {
  for (size_t i = 0; i < kChunkNames.size(); ++i) {
    if (kChunkNames[i] == name) return static_cast<ChunkTag>(i);
  }
  return std::nullopt;
}

const std::vector<std::string> &SentenceAbbreviations() {
  static const std::vector<std::string> abbreviations = {
      "mr.", "dr.", "v.", "etc.", "e.g.", "i.e."};
  return abbreviations;
}

std::vector<TextSpan> SplitSentences(std::string_view text) {
  std::vector<TextSpan> spans;
  const size_t n = text.size();
  auto skip_space = [&](size_t i) {
    while (i < n && IsSpace(text[i])) ++i;
    return i;
  };
  auto push = [&](size_t b, size_t e) {
    while (e > b && IsSpace(text[e - 1])) --e;
    if (e > b) spans.push_back({b, e});
  };

  size_t start = skip_space(0);
  size_t i = start;
  while (i < n) {
    if (!IsTerminator(text[i])) {
      ++i;
      continue;
    }
    size_t run_end = i;
    while (run_end < n && IsTerminator(text[run_end])) ++run_end;
    size_t j = run_end;
    while (j < n && IsCloser(text[j])) ++j;
    if (j < n && !IsSpace(text[j])) {
      i = j;
      continue;
    }
    std::string_view run = text.substr(i, run_end - i);
    bool boundary = true;
    if (run.size() >= 3 && run.find_first_not_of('.') == std::string_view::npos &&
        skip_space(j) < n) {
      boundary = false;  // mid-text ellipsis
    } else if (run == "." && j == run_end && IsAbbreviation(WordEndingAt(text, i))) {
      boundary = false;
    }
    if (boundary) {
      push(start, j);
      start = skip_space(j);
    }
    i = j;
  }
  if (start < n) push(start, n);
  return spans;
}

std::vector<Token> Tokenize(std::string_view sentence, size_t base) {
  std::vector<Token> tokens;
  const size_t n = sentence.size();
  size_t i = 0;
  while (i < n) {
    while (i < n && IsSpace(sentence[i])) ++i;
    if (i == n) break;
    size_t e = i;
    while (e < n && !IsSpace(sentence[e])) ++e;
    // Brackets and double quotes split the chunk into independent pieces.
    size_t piece = i;
    for (size_t k = i; k < e; ++k) {
      if (!IsBracketOrQuote(sentence[k])) continue;
      if (piece < k) EmitWord(sentence, piece, k, base, tokens);
      tokens.push_back(Plain(std::string(1, sentence[k]), base + k, base + k + 1));
      piece = k + 1;
    }
    if (piece < e) EmitWord(sentence, piece, e, base, tokens);
    i = e;
  }
  return tokens;
}

std::vector<Token> ChunkTokens(std::vector<Token> tokens) {
  for (const auto &t : tokens) {
    if (!t.pos) throw MissingPos("token '" + t.text + "' has no POS tag");
  }
  size_t i = 0;
  while (i < tokens.size()) {
    size_t np = MatchNp(tokens, i);
    size_t vp = np > 0 ? 0 : MatchVp(tokens, i);
    if (np == 0 && vp == 0) {
      tokens[i++].chunk = ChunkTag::kOutside;
      continue;
    }
    bool is_np = np > 0;
    size_t len = is_np ? np : vp;
    for (size_t k = 0; k < len; ++k) {
      tokens[i + k].chunk =
          is_np ? (k == 0 ? ChunkTag::kBeginNp : ChunkTag::kInsideNp)
                : (k == 0 ? ChunkTag::kBeginVp : ChunkTag::kInsideVp);
    }
    i += len;
  }
  return tokens;
}

bool IsValidChunkChain(const std::vector<Token> &tokens) {
  ChunkTag prev = ChunkTag::kOutside;
  for (const auto &t : tokens) {
    if (!t.chunk) return false;
    ChunkTag c = *t.chunk;
    if (c == ChunkTag::kInsideNp &&
        prev != ChunkTag::kBeginNp && prev != ChunkTag::kInsideNp) {
      return false;
    }
    if (c == ChunkTag::kInsideVp &&
        prev != ChunkTag::kBeginVp && prev != ChunkTag::kInsideVp) {
      return false;
    }
    prev = c;
  }
  return true;
}

}  // namespace revkg
