#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "groupline/error.hpp"

namespace groupline {

/// Calendar date (year, month, day) with whole-day arithmetic.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::year_month_day ymd) : days_(std::chrono::sys_days{ymd}) {}
  Date(int y, unsigned m, unsigned d) {
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw ParseError("invalid calendar date");
    days_ = std::chrono::sys_days{ymd};
  }

  /// Parses strict "YYYY-MM-DD".
  static Date parse(std::string_view s) {
    auto bad = [&] { return ParseError("invalid date '" + std::string(s) + "', expected YYYY-MM-DD"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw bad();
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::string_view part, auto& out) {
      auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
      if (ec != std::errc{} || p != part.data() + part.size()) throw bad();
    };
    num(s.substr(0, 4), y);
    num(s.substr(5, 2), m);
    num(s.substr(8, 2), d);
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw bad();
    return Date(ymd);
  }

  std::string str() const {
    std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
  }

  /// Days since 1970-01-01.
  long serial() const { return days_.time_since_epoch().count(); }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// Absolute difference in calendar days.
inline int day_diff(const Date& a, const Date& b) {
  long d = a.serial() - b.serial();
  return static_cast<int>(d < 0 ? -d : d);
}

}  // namespace groupline
