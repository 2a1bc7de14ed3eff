#pragma once

#include <stdexcept>
#include <string>

namespace strategem {

// Bad user input: malformed config, invalid field, precondition violation.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation has no feasible answer (e.g. no strategy assignment
// fits the per-device memory budget). CLI exit code 2.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// solve_exact refuses instances whose enumeration would be too large.
class SearchSpaceError : public std::runtime_error {
 public:
  explicit SearchSpaceError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal invariant. CLI exit code 3.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace strategem
