#ifndef REVKG_TEXT_UTIL_H_
#define REVKG_TEXT_UTIL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace revkg {

// ASCII-only case folding; multi-byte UTF-8 sequences pass through.
std::string ToLower(std::string_view s);

bool IsSpace(char c);
bool IsPunct(char c);
bool IsDigit(char c);
bool IsUpper(char c);
bool IsAlpha(char c);

std::string_view Trim(std::string_view s);

// Character classes with repeats collapsed: "Uber1.2x" -> "Xxd.dx".
std::string WordShape(std::string_view word);

// Trims and collapses internal whitespace runs to a single space.
std::string CollapseWhitespace(std::string_view s);

std::vector<std::string> Split(std::string_view s, char sep);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// Backslash escaping for tab-separated text files: \t \n \r \\ and the
// caller-chosen list separator.
std::string EscapeField(std::string_view s, char list_sep = '\0');
std::string UnescapeField(std::string_view s);

// Splits on `sep` honoring backslash escapes, then unescapes each part.
std::vector<std::string> SplitEscaped(std::string_view s, char sep);

std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);
bool FileExists(const std::string &path);

// Shortest round-trippable decimal form of a double.
std::string FormatDouble(double v);
double ParseDouble(std::string_view s);

uint64_t Fnv1a64(std::string_view s);

}  // namespace revkg

#endif  // REVKG_TEXT_UTIL_H_
