#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace stancegraph {

/// Calendar date with day resolution. All temporal splits in the pipeline are
/// yearly, monthly or quarterly, so no time-of-day is kept.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  /// Parses `YYYY-MM-DD`; throws ValidationError on malformed or impossible dates.
  static Date parse(std::string_view text);

  std::string to_string() const;
  unsigned quarter() const noexcept { return (month - 1) / 3 + 1; }

  friend auto operator<=>(const Date&, const Date&) = default;
  friend bool operator==(const Date&, const Date&) = default;
};

/// Last day of the given month, leap years included.
unsigned days_in_month(int year, unsigned month);

}  // namespace stancegraph
