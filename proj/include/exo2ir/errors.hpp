#pragma once

#include <stdexcept>
#include <string>

namespace exo2ir {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// A rewrite was rejected because its safety condition could not be proven.
// Carries an optional analysis trace (fact set + elimination steps) for the
// `explain` subcommand.
class SchedulingError : public Error {
public:
  explicit SchedulingError(std::string msg, std::string trace = {})
      : Error(std::move(msg)), trace_(std::move(trace)) {}
  const std::string& trace() const { return trace_; }

private:
  std::string trace_;
};

// A pattern search returned zero matches.
class NotFoundError : public SchedulingError {
public:
  using SchedulingError::SchedulingError;
};

// Analysis could not handle an expression shape (e.g. non-affine index).
class AnalysisError : public SchedulingError {
public:
  using SchedulingError::SchedulingError;
};

// Navigation or resolution of a cursor that does not denote a location.
class InvalidCursorError : public Error {
public:
  using Error::Error;
};

// forward() was asked to map a cursor whose version is not an ancestor of
// the target procedure.
class ProvenanceError : public InvalidCursorError {
public:
  using InvalidCursorError::InvalidCursorError;
};

// Bugs and broken internal invariants. Deliberately NOT caught by try_else.
class InternalError : public Error {
public:
  using Error::Error;
};

// Malformed fragments handed to the atomic edit engine.
class EditError : public InternalError {
public:
  using InternalError::InternalError;
};

class ParseError : public Error {
public:
  ParseError(std::string msg, int line, int col)
      : Error(std::move(msg)), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

private:
  int line_;
  int col_;
};

class WellFormednessError : public Error {
public:
  using Error::Error;
};

// The interpreter hit out-of-bounds, uninitialized reads, or division by
// zero; `where` is the offending statement path rendered as text.
class RuntimeFault : public Error {
public:
  explicit RuntimeFault(std::string msg, std::string where = {})
      : Error(std::move(msg)), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

private:
  std::string where_;
};

// random_instance could not satisfy the asserts within the size range.
class InstanceError : public Error {
public:
  using Error::Error;
};

// emit_c rejected an annotation inconsistency.
class BackendError : public Error {
public:
  using Error::Error;
};

}  // namespace exo2ir
