#pragma once

#include <stdexcept>
#include <string>

namespace chop {

struct SourcePos {
  int line = 0;
  int col = 0;
  bool known() const { return line > 0; }
};

enum class ErrorKind {
  SyntaxError,
  DuplicateDeclaration,
  UnknownProcedure,
  TypeMismatch,
  LinearityViolation,
  UnknownName,
  ContextNotEmpty,
  NonExponentialServerContext,
  TypeVarEscape,
  LabelMismatch,
  IncoherentGlobalType,
  AtomicType,
  NotWellFormed,
  Unsupported,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message, SourcePos pos = {})
      : std::runtime_error(message), kind_(kind), pos_(pos) {}

  ErrorKind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  std::string message() const { return what(); }

private:
  ErrorKind kind_;
  SourcePos pos_;
};

// Thrown by the checker; kept distinct so callers can catch typing failures only.
class TypeError : public Error {
public:
  using Error::Error;
};

class SyntaxError : public Error {
public:
  SyntaxError(std::string message, SourcePos pos)
      : Error(ErrorKind::SyntaxError, std::move(message), pos) {}
};

} // namespace chop
