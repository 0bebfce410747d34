#pragma once

#include <compare>
#include <string>

namespace mango {

/// Calendar date (ISO-8601 "YYYY-MM-DD" on the wire).
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;

  /// Parses "YYYY-MM-DD" with range validation. Throws ParseError-free
  /// Error on malformed input (callers add line context).
  static Date parse(const std::string& iso);

  std::string to_string() const;
};

}  // namespace mango
