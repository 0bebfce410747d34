#include "mango/date.hpp"

#include <cstdio>

#include "mango/error.hpp"

namespace mango {

namespace {

bool is_leap(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
  static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return days[m - 1];
}

}  // namespace

Date Date::parse(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char trailing = 0;
  if (std::sscanf(iso.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &trailing) != 3 ||
      iso.size() != 10) {
    throw Error("bad date '" + iso + "': expected YYYY-MM-DD");
  }
  if (y < 1 || m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
    throw Error("bad date '" + iso + "': out of range");
  }
  return Date{y, m, d};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

}  // namespace mango
