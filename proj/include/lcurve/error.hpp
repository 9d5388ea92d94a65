#pragma once

#include <stdexcept>
#include <string>

namespace lcurve {

/// Failure categories surfaced by the library. The CLI maps each one to a
/// process exit code (input 2, numerical 3, infeasible 4).
enum class ErrorKind { input, numerical, infeasible };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Bad argument, malformed file, unknown label, violated precondition.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

/// Optimizer did not converge or a linear system could not be solved.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

/// No sample size satisfies the requested targets.
class InfeasiblePlan : public Error {
 public:
  explicit InfeasiblePlan(const std::string& what)
      : Error(ErrorKind::infeasible, what) {}
};

inline const char* error_class_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input:
      return "input_error";
    case ErrorKind::numerical:
      return "numerical_failure";
    case ErrorKind::infeasible:
      return "infeasible_plan";
  }
  return "error";
}

}  // namespace lcurve
