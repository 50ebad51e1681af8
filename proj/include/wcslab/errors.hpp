#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wcslab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data: wrong array shape, mismatched dimensions, broken invariants.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for this input (e.g. exact integral on a bounds-only surface).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// A truncated symbol expansion cannot supply the requested homogeneous component.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int deficit)
      : Error(what + " (missing " + std::to_string(deficit) + " component(s))"), deficit_(deficit) {}

  [[nodiscard]] int deficit() const noexcept { return deficit_; }

 private:
  int deficit_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what), line_(line), column_(column) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace wcslab
