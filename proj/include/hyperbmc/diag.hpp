#pragma once

#include <stdexcept>
#include <string>

namespace hyperbmc {

struct SourceLoc {
  std::string origin;
  int line = 0;
  int column = 0;

  std::string str() const {
    if (origin.empty() && line == 0) return "<unknown>";
    std::string s = origin.empty() ? std::string("<input>") : origin;
    if (line > 0) {
      s += ":" + std::to_string(line);
      if (column > 0) s += ":" + std::to_string(column);
    }
    return s;
  }
};

// Problems in user-supplied models, formulas or arguments. Caught at the CLI
// boundary and reported with location; never aborts the process.
class InputError : public std::runtime_error {
 public:
  InputError(SourceLoc loc, const std::string& msg)
      : std::runtime_error(loc.str() + ": " + msg), loc_(std::move(loc)) {}
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
  const SourceLoc& where() const { return loc_; }

 private:
  SourceLoc loc_;
};

// Violations of internal invariants, e.g. a decoded trace that does not
// satisfy the model's transition relation. Signals a bug, never user error.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

// A configured resource limit was hit. Distinguished from a wrong answer:
// callers map this to an inconclusive outcome, never to SAT/UNSAT.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hyperbmc
