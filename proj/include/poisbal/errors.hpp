#pragma once

#include <stdexcept>
#include <string>

namespace poisbal {

// Violated size guards, unsatisfiable search ranges, infeasible programs,
// exceeded enumeration budgets. The CLI maps these to exit code 2.
class GuardError : public std::runtime_error {
 public:
  explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input documents. The CLI maps these to exit code 1.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace poisbal
