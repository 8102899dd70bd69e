#pragma once

#include <chrono>
#include <cstdio>
#include <string>

#include "weedmap/errors.hpp"

namespace weedmap {

// Calendar dates at day resolution; intra-day time is discarded at ingestion.
using Date = std::chrono::sys_days;

inline Date make_date(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                     std::chrono::day{day}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::ParseError,
                "invalid calendar date " + std::to_string(year) + "-" +
                    std::to_string(month) + "-" + std::to_string(day));
  }
  return sys_days{ymd};
}

// Strict ISO-8601 "YYYY-MM-DD".
inline Date parse_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
    throw Error(ErrorCode::ParseError, "expected YYYY-MM-DD, got '" + text + "'");
  }
  return make_date(y, m, d);
}

inline std::string format_date(Date date) {
  std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline long days_between(Date from, Date to) {
  return (to - from).count();
}

inline Date add_days(Date date, long days) {
  return date + std::chrono::days{days};
}

}  // namespace weedmap
