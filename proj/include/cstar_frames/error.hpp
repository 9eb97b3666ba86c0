#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cstar_frames {

enum class ErrorCode {
    NotSquare,
    NotHermitian,
    NoConvergence,
    Singular,
    NotPSD,
    NonFinite,
    ShapeMismatch,
    LengthMismatch,
    NotAFrame,
    NegativeEta,
    NegativeMu,
    InvalidRho,
    XiZero,
    SingularS,
    InconsistentDecomposition,
    TruncationTooLarge,
    NonPositiveXi,
    InvalidProfile,
    IndexOutOfRange,
    ZeroMultiplicity,
    NotSameOperator,
    TooManyPartitions,
    OddN,
    NonzeroLimit,
    InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotAFrame: return "NotAFrame";
    case ErrorCode::NegativeEta: return "NegativeEta";
    case ErrorCode::NegativeMu: return "NegativeMu";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::XiZero: return "XiZero";
    case ErrorCode::SingularS: return "SingularS";
    case ErrorCode::InconsistentDecomposition: return "InconsistentDecomposition";
    case ErrorCode::TruncationTooLarge: return "TruncationTooLarge";
    case ErrorCode::NonPositiveXi: return "NonPositiveXi";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ZeroMultiplicity: return "ZeroMultiplicity";
    case ErrorCode::NotSameOperator: return "NotSameOperator";
    case ErrorCode::TooManyPartitions: return "TooManyPartitions";
    case ErrorCode::OddN: return "OddN";
    case ErrorCode::NonzeroLimit: return "NonzeroLimit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cstar_frames
