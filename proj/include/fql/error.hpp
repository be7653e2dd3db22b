#pragma once

#include <stdexcept>
#include <string>

namespace fql {

/// Base of every structured error raised by the library. The CLI maps these
/// to exit code 1 and prints what() verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input lies outside the domain where an operation is defined
/// (|t| > 1, |v| >= 1 in an Artin-Schreier step, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough absolute precision to produce a meaningful result, or an exact
/// operation whose result is not finitely representable.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// A linear system had no pivot distinguishable from zero.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// The requested element does not exist in the fixed coefficient field
/// (e.g. a square root of a non-square); rerun with a larger extension degree.
class FieldExtensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries a 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace fql
