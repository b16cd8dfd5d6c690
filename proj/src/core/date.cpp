#include "stancegraph/core/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "stancegraph/core/error.hpp"

namespace stancegraph {
namespace {

template <class T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

Date Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ValidationError("date must be YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  Date d;
  if (!parse_number(text.substr(0, 4), d.year) || !parse_number(text.substr(5, 2), d.month) ||
      !parse_number(text.substr(8, 2), d.day)) {
    throw ValidationError("date must be YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{d.year}, std::chrono::month{d.month},
                                        std::chrono::day{d.day}};
  if (!ymd.ok()) {
    throw ValidationError("invalid calendar date '" + std::string(text) + "'");
  }
  return d;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

unsigned days_in_month(int year, unsigned month) {
  const std::chrono::year_month_day_last last{std::chrono::year{year} / std::chrono::month{month} /
                                              std::chrono::last};
  return static_cast<unsigned>(last.day());
}

}  // namespace stancegraph
