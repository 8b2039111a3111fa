#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparse_bandit {

enum class ErrorCode {
    EmptyInstance,
    SparsityMismatch,
    InvalidArgument,
    IndexOutOfRange,
    LengthMismatch,
    NotInitialized,
    InvariantViolation,
    NonzeroBadArm,
    NoValidK,
    DegenerateNoBadArms,
    NumericalFailure,
    WrongPolicy,
    ParseError,
    ValidationError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this type; `code()` is stable,
// the message is for humans.
class BanditError : public std::runtime_error {
public:
    BanditError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInstance: return "EmptyInstance";
        case ErrorCode::SparsityMismatch: return "SparsityMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NotInitialized: return "NotInitialized";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::NonzeroBadArm: return "NonzeroBadArm";
        case ErrorCode::NoValidK: return "NoValidK";
        case ErrorCode::DegenerateNoBadArms: return "DegenerateNoBadArms";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::WrongPolicy: return "WrongPolicy";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace sparse_bandit
