#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confrate {

enum class ErrorCode {
  kDimension,
  kInfeasibleConstraint,
  kDegenerateBound,
  kDegenerateAbstain,
  kInvalidCost,
  kInfiniteDivergence,
  kInvalidArgument,
  kParse,
  kIo,
};

/// Machine-readable name, e.g. "infeasible_constraint".
std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace confrate
