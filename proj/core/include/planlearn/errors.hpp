#pragma once

#include <stdexcept>
#include <string>

namespace planlearn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the plan-trace parser. `kind` distinguishes pure syntax problems
// (which carry a position) from violated trace invariants.
class TraceError : public Error {
 public:
  enum class Kind { Syntax, IndexGap, Duplicate };

  TraceError(Kind kind, std::string message, int line = 0, int column = 0)
      : Error(message + (line > 0 ? " (line " + std::to_string(line) + ", col " +
                                        std::to_string(column) + ")"
                                  : "")),
        kind_(kind),
        line_(line),
        column_(column) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

// Raised by the PDDL reader; `construct` names the offending construct when
// the input uses something outside the supported subset.
class DomainError : public Error {
 public:
  explicit DomainError(std::string message, std::string construct = "")
      : Error(std::move(message)), construct_(std::move(construct)) {}

  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

class PipelineError : public Error {
 public:
  using Error::Error;
};

class ReplayError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace planlearn
