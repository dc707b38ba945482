#pragma once

// Small text helpers shared by the CSV readers and writers.

#include <charconv>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "ewsim/error.hpp"

namespace ewsim::text {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

// Whole-field parse; returns false on trailing garbage or an empty field.
inline bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

inline double require_double(std::string_view field, std::size_t line, std::string_view what) {
  double v = 0.0;
  if (!parse_double(field, v)) {
    throw ParseError(line, "cannot parse " + std::string(what) + " '" + std::string(field) + "'");
  }
  return v;
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// getline that also counts lines and strips a trailing '\r'.
inline bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
  if (!std::getline(in, line)) return false;
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

inline void expect_header(std::istream& in, std::string& line, std::size_t& line_no,
                          std::string_view header) {
  if (!next_line(in, line, line_no)) throw ParseError(1, "missing header '" + std::string(header) + "'");
  // tolerate a UTF-8 byte-order mark
  std::string_view got = line;
  if (got.substr(0, 3) == "\xEF\xBB\xBF") got.remove_prefix(3);
  if (trim(got) != header) {
    throw ParseError(line_no, "expected header '" + std::string(header) + "', got '" + line + "'");
  }
}

}  // namespace ewsim::text
