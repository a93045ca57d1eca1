#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

enum class ErrorKind {
    InvalidConfig,
    DegenerateCoupling,
    IndexOutOfRange,
    NonConvergence,
    StepUnderflow,
    NotHermitian,
    NotPositive,
    OutOfDomain,
    QuadratureFailure,
    ZeroDenominator,
    DiagonalizationFailure,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , kind_(kind)
    {
    }

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DegenerateCoupling: return "DegenerateCoupling";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::DiagonalizationFailure: return "DiagonalizationFailure";
    case ErrorKind::Io: return "IoError";
    }
    return "Unknown";
}

} // namespace qsl
