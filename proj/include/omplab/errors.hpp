#pragma once

#include <stdexcept>
#include <string>

namespace omplab {

/// Precondition or invariant violated by the caller.
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input falls in a range the method deliberately does not cover.
struct ExcludedCase : ContractViolation {
  using ContractViolation::ContractViolation;
};

/// Exhaustive enumeration would exceed the configured support budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested iteration count exceeds what the problem size admits.
struct IterationBudget : ContractViolation {
  using ContractViolation::ContractViolation;
};

/// File could not be read/written or failed to parse.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace omplab
