#pragma once

#include <stdexcept>
#include <string>

namespace rlshrink {

enum class ErrorCode {
    dimension = 1,
    covariance,
    ridge,
    degenerate,
    divided_difference,
    setting,
    config,
    io,
    unknown_estimator,
    invalid_argument,
};

const char* to_string(ErrorCode code) noexcept;

/// Library exception. Every failure raised by rlshrink carries one of the codes
/// above; the C API maps them one-to-one onto its status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rlshrink
