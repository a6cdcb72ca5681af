#pragma once

#include <stdexcept>
#include <string>

namespace groupline {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (timeline, annotation CSV, model file).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// HLGD entry missing a required field or carrying an out-of-range value.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A scorer read a field its challenge tier does not permit.
class TierError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or inconsistent inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace groupline
