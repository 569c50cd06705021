#include "rlshrink/error.hpp"

namespace rlshrink {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::dimension: return "dimension error";
    case ErrorCode::covariance: return "covariance error";
    case ErrorCode::ridge: return "ridge error";
    case ErrorCode::degenerate: return "degenerate data";
    case ErrorCode::divided_difference: return "divided-difference degeneracy";
    case ErrorCode::setting: return "setting error";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::unknown_estimator: return "unknown estimator";
    case ErrorCode::invalid_argument: return "invalid argument";
    }
    return "unknown error";
}

}  // namespace rlshrink
