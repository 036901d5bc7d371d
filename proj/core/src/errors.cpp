#include "saddleflow/errors.hpp"

namespace saddleflow {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid input";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Unbounded: return "unbounded";
    case ErrorCode::BudgetExceeded: return "budget exceeded";
    case ErrorCode::UnboundedSolutionSet: return "unbounded solution set";
    case ErrorCode::NegativePrimal: return "negative primal state";
    case ErrorCode::NonFinite: return "non-finite state";
    case ErrorCode::BoundedFeasibleSet: return "bounded feasible set";
    case ErrorCode::ZeroRow: return "zero row";
  }
  return "unknown";
}

}  // namespace saddleflow
