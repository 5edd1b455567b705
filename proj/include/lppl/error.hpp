#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lppl {

enum class ErrorCode {
  Domain,            // evaluation at or past the singularity
  DegenerateWindow,  // no degrees of freedom left
  DegenerateDesign,  // linear subproblem ill-conditioned
  BZero,             // C cannot be recovered from C*B
  InitInvalid,
  NotSymmetric,
  SummaryEmpty,
  TooFewSamples,
  InvalidArgument,
  Parse,
  Gap,
  NonPositive,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Input-side problems (parse, gap, I/O, bad arguments) as opposed to
  /// numerical failures.
  bool is_input_error() const noexcept {
    switch (code_) {
      case ErrorCode::Parse:
      case ErrorCode::Gap:
      case ErrorCode::NonPositive:
      case ErrorCode::Io:
      case ErrorCode::InvalidArgument:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace lppl
