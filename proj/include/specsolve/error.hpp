#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specsolve {

enum class ErrorKind {
  InvalidArgument,
  DomainError,
  ResolutionFailure,
  BasisMismatch,
  InvalidTruncation,
  IllPosedConstraints,
  SingularSystem,
  SolverFailure,
  SolverBreakdown,
  InvalidGrid,
  InternalError,
  ParseError,
  BudgetError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes failure classes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::ResolutionFailure: return "resolution-failure";
    case ErrorKind::BasisMismatch: return "basis-mismatch";
    case ErrorKind::InvalidTruncation: return "invalid-truncation";
    case ErrorKind::IllPosedConstraints: return "ill-posed-constraints";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::SolverBreakdown: return "solver-breakdown";
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::InternalError: return "internal-error";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::BudgetError: return "budget-error";
  }
  return "unknown";
}

}  // namespace specsolve
