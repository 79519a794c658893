#pragma once

#include <stdexcept>
#include <string>

namespace jamgraph {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParse,
  kConstantColumn,
  kRankDeficient,
  kShapeMismatch,
  kNonFinite,
  kZeroResidual,
  kTooManyEdges,
  kDegenerateComponent,
  kDimensionMismatch,
};

// All library failures are reported through this exception; the C API maps
// the code onto jg_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace jamgraph
