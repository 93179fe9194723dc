#ifndef KICKCAST_DATE_HPP
#define KICKCAST_DATE_HPP

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "kickcast/error.hpp"

namespace kickcast {

// Calendar date at day resolution, stored as days since 1970-01-01.
// No time zones; arithmetic is in calendar days.
class Date {
 public:
  Date() = default;
  explicit Date(int days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day) {
    namespace ch = std::chrono;
    ch::year_month_day ymd{ch::year{year}, ch::month{month}, ch::day{day}};
    if (!ymd.ok()) throw input_error("invalid calendar date");
    return Date(static_cast<int>(ch::sys_days{ymd}.time_since_epoch().count()));
  }

  // Parses strict ISO-8601 "YYYY-MM-DD".
  static Date parse(std::string_view iso) {
    auto parsed = try_parse(iso);
    if (!parsed) throw input_error("unparseable date: '" + std::string(iso) + "'");
    return *parsed;
  }

  static std::optional<Date> try_parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    auto digits = [&](size_t pos, size_t len, int& out) {
      out = 0;
      for (size_t i = pos; i < pos + len; ++i) {
        if (iso[i] < '0' || iso[i] > '9') return false;
        out = out * 10 + (iso[i] - '0');
      }
      return true;
    };
    int y = 0, m = 0, d = 0;
    if (!digits(0, 4, y) || !digits(5, 2, m) || !digits(8, 2, d)) return std::nullopt;
    namespace ch = std::chrono;
    ch::year_month_day ymd{ch::year{y}, ch::month{static_cast<unsigned>(m)},
                           ch::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date(static_cast<int>(ch::sys_days{ymd}.time_since_epoch().count()));
  }

  int days_since_epoch() const { return days_; }

  int year() const {
    namespace ch = std::chrono;
    ch::year_month_day ymd{ch::sys_days{ch::days{days_}}};
    return static_cast<int>(ymd.year());
  }

  std::string to_string() const {
    namespace ch = std::chrono;
    ch::year_month_day ymd{ch::sys_days{ch::days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  // Shifts by whole calendar years; Feb 29 clamps to Feb 28 in non-leap years.
  Date add_years(int n) const {
    namespace ch = std::chrono;
    ch::year_month_day ymd{ch::sys_days{ch::days{days_}}};
    ymd += ch::years{n};
    if (!ymd.ok()) ymd = ymd.year() / ymd.month() / ch::day{28};
    return Date(static_cast<int>(ch::sys_days{ymd}.time_since_epoch().count()));
  }

  friend int operator-(Date a, Date b) { return a.days_ - b.days_; }
  friend auto operator<=>(Date, Date) = default;

 private:
  int days_ = 0;
};

}  // namespace kickcast

#endif
