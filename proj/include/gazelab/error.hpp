#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace gazelab {

enum class ErrorCode {
    // log validation
    NonMonotonicTime,
    NonPositiveMetric,
    ScanIdRegression,
    MixedAxisInScan,
    AxisAlternationViolation,
    // geometry
    OutOfFov,
    DegenerateRect,
    EmptyTrace,
    // simulation
    OutOfScan,
    TraceTooShort,
    // inference
    TooShort,
    SeriesShorterThanWindow,
    TangentDomain,
    MissingGroundTruth,
    NoScans,
    EmptyGrid,
    FewerThanTwoGroups,
    // detection
    WindowTooShort,
    SingleClass,
    DegenerateData,
    LengthMismatch,
    // io / config
    ParseError,
    ConfigError,
    IoError,
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
        case ErrorCode::NonPositiveMetric: return "NonPositiveMetric";
        case ErrorCode::ScanIdRegression: return "ScanIdRegression";
        case ErrorCode::MixedAxisInScan: return "MixedAxisInScan";
        case ErrorCode::AxisAlternationViolation: return "AxisAlternationViolation";
        case ErrorCode::OutOfFov: return "OutOfFov";
        case ErrorCode::DegenerateRect: return "DegenerateRect";
        case ErrorCode::EmptyTrace: return "EmptyTrace";
        case ErrorCode::OutOfScan: return "OutOfScan";
        case ErrorCode::TraceTooShort: return "TraceTooShort";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::SeriesShorterThanWindow: return "SeriesShorterThanWindow";
        case ErrorCode::TangentDomain: return "TangentDomain";
        case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
        case ErrorCode::NoScans: return "NoScans";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::FewerThanTwoGroups: return "FewerThanTwoGroups";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

/// Library-wide exception. `index()` points at the first offending record
/// or sample when the failure is positional.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    Error(ErrorCode code, std::string message, std::size_t index)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message +
                             " (index " + std::to_string(index) + ")"),
          code_(code),
          index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

} // namespace gazelab
