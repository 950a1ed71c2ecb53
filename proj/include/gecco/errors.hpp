#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gecco {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. `row()` is the 1-based line of the offending record.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class EmptyLog : public Error {
 public:
  EmptyLog() : Error("event log contains no events") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnknownClass : public Error {
 public:
  explicit UnknownClass(const std::string& name) : Error("unknown event class: " + name) {}
};

/// Constraint document does not follow the grammar.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& what)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Constraint is well-formed but meaningless (bad fraction, negative bound, ...).
class SemanticError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NotAPartition : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotACover : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NoInstances : public Error {
 public:
  using Error::Error;
};

class NoCandidates : public Error {
 public:
  NoCandidates() : Error("cover problem has no candidate groups") {}
};

class TooFewGroups : public Error {
 public:
  TooFewGroups() : Error("silhouette needs at least two groups") {}
};

/// No grouping can satisfy the constraints (raised by the greedy baseline).
class Infeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace gecco
