#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stancegraph::text {

/// ASCII case folding. Bytes outside ASCII pass through unchanged, which keeps
/// UTF-8 sequences intact and makes accented letters compare exactly.
std::string casefold(std::string_view s);

std::string trim(std::string_view s);

/// Collapses every whitespace run to a single space and trims the ends.
std::string normalize_space(std::string_view s);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Case-insensitive whole-word occurrences of `needle` in `haystack`. A word
/// boundary is any byte that is not an ASCII letter/digit and not part of a
/// multi-byte UTF-8 sequence.
std::vector<Span> find_whole_word(std::string_view haystack, std::string_view needle);

bool contains_whole_word(std::string_view haystack, std::string_view needle);

/// Lower-cased alphanumeric tokens (UTF-8 sequences kept inside tokens).
std::vector<std::string> tokenize(std::string_view s);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);

}  // namespace stancegraph::text
