#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace piotrowski {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a dataset invariant (empty body, bad year range).
class DataError : public Error {
 public:
  using Error::Error;
};

// Caller-supplied parameters outside their domain (e.g. overlap >= window).
class ParameterError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  enum class Kind {
    Underdetermined,
    DegenerateAbscissa,
    SingularDesign,
    NestingViolation,
    UnsupportedConversion,
  };

  FitError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace piotrowski
