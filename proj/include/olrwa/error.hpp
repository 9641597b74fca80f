#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace olrwa {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NonFinite,
    VerticalHyperplane,
    ZeroNormal,
    DegenerateAverage,
    NotParallel,
    ZeroVariance,
    MissingFile,
    ParseError,
    NonNumericValue,
    EmptyData,
    UnknownColumn,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::VerticalHyperplane: return "VerticalHyperplane";
    case ErrorCode::ZeroNormal: return "ZeroNormal";
    case ErrorCode::DegenerateAverage: return "DegenerateAverage";
    case ErrorCode::NotParallel: return "NotParallel";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace olrwa
