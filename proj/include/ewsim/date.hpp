#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace ewsim {

using Date = std::chrono::year_month_day;

// Strict YYYY-MM-DD. Throws ewsim::Error(parse) on anything else.
Date parse_date(std::string_view text);

std::string format_date(Date date);

inline int year_of(Date date) { return static_cast<int>(date.year()); }
inline unsigned month_of(Date date) { return static_cast<unsigned>(date.month()); }

inline bool same_month(Date a, Date b) {
  return a.year() == b.year() && a.month() == b.month();
}

}  // namespace ewsim
