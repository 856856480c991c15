#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

// Machine-readable failure categories. Validation errors map to CLI exit
// code 1, numerical failures (NonConvergence, DegenerateChain) to exit 2.
enum class ErrorCode {
    NonFinite,
    NegativeRate,
    ShapeMismatch,
    EmptyStream,
    EmptyInput,
    NonMonotoneTime,
    DimOutOfRange,
    SafetyCapExceeded,
    InsufficientData,
    NonConvergence,
    LikelihoodDecrease,
    ShapeTooSmall,
    TooFewResamples,
    NonPositiveEstimate,
    DegenerateChain,
    ParseError,
    InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    bool is_numerical() const noexcept {
        return code_ == ErrorCode::NonConvergence || code_ == ErrorCode::DegenerateChain;
    }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace hawkes
