#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hkq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. Line and column are 1-based; zero when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class EnumerationBoundExceeded : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure stopped without a certificate-backed answer.
class UndecidedError : public Error {
 public:
  using Error::Error;
};

}  // namespace hkq
