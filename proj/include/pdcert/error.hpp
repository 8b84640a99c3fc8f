#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdcert {

enum class ErrorCode {
    UnsupportedExactVolume,
    UnsupportedMembership,
    UnsupportedKind,
    DimensionMismatch,
    DimensionTooLarge,
    UnboundedRegion,
    NotAPacking,
    NotComparable,
    BadParameters,
    QuadratureFailure,
    ZeroWitness,
    ResourceCap,
    Parse,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse failure carrying the 0-based character offset into the literal.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& what)
        : Error(ErrorCode::Parse, what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::UnsupportedExactVolume: return "UnsupportedExactVolume";
    case ErrorCode::UnsupportedMembership: return "UnsupportedMembership";
    case ErrorCode::UnsupportedKind: return "UnsupportedKind";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::UnboundedRegion: return "UnboundedRegion";
    case ErrorCode::NotAPacking: return "NotAPacking";
    case ErrorCode::NotComparable: return "NotComparable";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::ZeroWitness: return "ZeroWitness";
    case ErrorCode::ResourceCap: return "ResourceCap";
    case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

} // namespace pdcert
