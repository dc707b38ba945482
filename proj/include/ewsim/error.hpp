#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ewsim {

enum class ErrorCode {
  invalid_argument = 1,
  parse = 2,
  data = 3,
  config = 4,
  io = 5,
};

// All engine failures surface as this exception; the C API maps `code()` onto
// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Input-file error that remembers the 1-based line it was raised on.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ewsim
