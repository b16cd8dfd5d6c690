#include "stancegraph/core/text.hpp"

namespace stancegraph::text {
namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char fold(unsigned char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c); }

}  // namespace

std::string casefold(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = fold(static_cast<unsigned char>(c));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_space(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (unsigned char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::vector<Span> find_whole_word(std::string_view haystack, std::string_view needle) {
  std::vector<Span> spans;
  const std::string folded_needle = trim(casefold(needle));
  if (folded_needle.empty() || folded_needle.size() > haystack.size()) return spans;
  const std::string folded = casefold(haystack);
  std::size_t pos = 0;
  while ((pos = folded.find(folded_needle, pos)) != std::string::npos) {
    const std::size_t end = pos + folded_needle.size();
    const bool left_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(folded[pos - 1])) ||
                         !is_word_byte(static_cast<unsigned char>(folded_needle.front()));
    const bool right_ok = end == folded.size() || !is_word_byte(static_cast<unsigned char>(folded[end])) ||
                          !is_word_byte(static_cast<unsigned char>(folded_needle.back()));
    if (left_ok && right_ok) spans.push_back({pos, end});
    ++pos;
  }
  return spans;
}

bool contains_whole_word(std::string_view haystack, std::string_view needle) {
  return !find_whole_word(haystack, needle).empty();
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : s) {
    if (is_word_byte(c)) {
      cur.push_back(fold(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace stancegraph::text
