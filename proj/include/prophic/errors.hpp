#pragma once

#include <stdexcept>
#include <string>

namespace prophic {

class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

class SortMismatch : public Error
{
 public:
  SortMismatch(std::string msg, int child) : Error(std::move(msg)), child_(child)
  {
  }
  /// Offending child position, or -1 when the mismatch is not positional.
  int child() const { return child_; }

 private:
  int child_;
};

class UnassignedVariable : public Error
{
 public:
  explicit UnassignedVariable(std::string var)
      : Error("unassigned variable: " + var), var_(std::move(var))
  {
  }
  const std::string & variable() const { return var_; }

 private:
  std::string var_;
};

class EvalError : public Error
{
 public:
  using Error::Error;
};

class UnknownVariable : public Error
{
 public:
  using Error::Error;
};

class InvalidDepth : public Error
{
 public:
  using Error::Error;
};

class ScopeError : public Error
{
 public:
  using Error::Error;
};

class FiniteIndexSort : public Error
{
 public:
  using Error::Error;
};

class NestedArray : public Error
{
 public:
  using Error::Error;
};

class UnmappedSymbol : public Error
{
 public:
  using Error::Error;
};

// solver process failures
class SolverError : public Error
{
 public:
  using Error::Error;
};

class SolverCrashed : public SolverError
{
 public:
  using SolverError::SolverError;
};

class ProtocolError : public SolverError
{
 public:
  using SolverError::SolverError;
};

class SolverTimeout : public SolverError
{
 public:
  using SolverError::SolverError;
};

class ParseError : public Error
{
 public:
  ParseError(const std::string & msg, int line, int col)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col)
  {
  }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

class UnsupportedLogic : public Error
{
 public:
  using Error::Error;
};

class MissingSection : public Error
{
 public:
  using Error::Error;
};

class NotConsecutive : public Error
{
 public:
  using Error::Error;
};

class RefinementStuck : public Error
{
 public:
  using Error::Error;
};

class EngineCrashed : public Error
{
 public:
  using Error::Error;
};

class InvalidTrace : public Error
{
 public:
  using Error::Error;
};

}  // namespace prophic
