#pragma once

#include <stdexcept>
#include <string>

namespace mvvar {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file (bad cell, wrong column count, ...). The message
/// names the offending row/column.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

/// Input violates a domain precondition (out-of-range value, empty data,
/// inconsistent dimensions requested by the caller).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// Dimension mismatch between containers that must agree.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A model handed to a solver is structurally invalid (e.g. indefinite
/// quadratic term beyond tolerance).
class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error(what) {}
};

/// An internal consistency check failed. Indicates a bug, not bad input.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(what) {}
};

/// A solver ran out of its iteration/node/time budget. Distinct from
/// infeasibility, which is a regular solution status.
class ResourceLimitError : public Error {
 public:
  explicit ResourceLimitError(const std::string& what) : Error(what) {}
};

/// A file could not be opened or written.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace mvvar
