#include "confrate/error.hpp"

namespace confrate {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDimension: return "dimension_mismatch";
    case ErrorCode::kInfeasibleConstraint: return "infeasible_constraint";
    case ErrorCode::kDegenerateBound: return "degenerate_bound";
    case ErrorCode::kDegenerateAbstain: return "degenerate_abstain";
    case ErrorCode::kInvalidCost: return "invalid_cost";
    case ErrorCode::kInfiniteDivergence: return "infinite_divergence";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace confrate
