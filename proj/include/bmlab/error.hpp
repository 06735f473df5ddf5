#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bmlab {

enum class ErrorKind {
    InvalidArgument,
    DuplicatePoint,
    NotSeparated,
    EmptyRange,
    SinglePoint,
    OutOfWindow,
    EmptyWindow,
    BadGap,
    WindowTooSmall,
    SizeGuard,
    NumericalBreakdown,
    UnknownGenerator,
    Io,
    Usage,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DuplicatePoint: return "DuplicatePoint";
    case ErrorKind::NotSeparated: return "NotSeparated";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::SinglePoint: return "SinglePoint";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::BadGap: return "BadGap";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::SizeGuard: return "SizeGuard";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::UnknownGenerator: return "UnknownGenerator";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Usage: return "Usage";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable kind; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

} // namespace bmlab
