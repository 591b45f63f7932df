#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pgr {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file layout (truncated binary frame, bad magic, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise unusable point data.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t point_index)
      : Error(what + " (point " + std::to_string(point_index) + ")"),
        point_index_(point_index) {}
  explicit DataError(const std::string& what) : Error(what) {}

  std::size_t point_index() const noexcept { return point_index_; }

 private:
  std::size_t point_index_ = static_cast<std::size_t>(-1);
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

// Unknown preset / preprocessor name.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Caller violated a precondition (mask length mismatch, wrong arity, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

// Numeric domain problems: non-overlapping rate ranges, zero denominators.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Too few samples for a fit.
class ArityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pgr
