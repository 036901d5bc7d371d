#pragma once

#include <stdexcept>
#include <string>

namespace saddleflow {

enum class ErrorCode {
  InvalidInput,
  Infeasible,
  Unbounded,
  BudgetExceeded,
  UnboundedSolutionSet,
  NegativePrimal,
  NonFinite,
  BoundedFeasibleSet,
  ZeroRow,
};

/// Library-wide exception; `code()` tells callers (and the CLI) what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* to_string(ErrorCode code);

}  // namespace saddleflow
