#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsnom {

enum class ErrorKind {
    InvalidParameter,
    NotHermitian,
    NotDiagonal,
    NotNormalized,
    BadSubsystemIndex,
    DimensionMismatch,
    UnsupportedPermittivity,
    DegenerateGap,
    AmbiguousMatching,
    DegenerateDenominator,
    ZeroState,
    ShiftExceedsGap,
    OutOfBracket,
    NoConvergence,
    Config,
    Io,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotDiagonal: return "NotDiagonal";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::BadSubsystemIndex: return "BadSubsystemIndex";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnsupportedPermittivity: return "UnsupportedPermittivity";
    case ErrorKind::DegenerateGap: return "DegenerateGap";
    case ErrorKind::AmbiguousMatching: return "AmbiguousMatching";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::ZeroState: return "ZeroState";
    case ErrorKind::ShiftExceedsGap: return "ShiftExceedsGap";
    case ErrorKind::OutOfBracket: return "OutOfBracket";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Argument checks that precede any numerical work.
inline bool is_validation_error(ErrorKind kind)
{
    return kind == ErrorKind::InvalidParameter || kind == ErrorKind::UnsupportedPermittivity ||
           kind == ErrorKind::Config;
}

} // namespace qsnom
