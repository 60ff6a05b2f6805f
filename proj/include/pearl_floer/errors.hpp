/**
 * Error type shared by every module.
 *
 * All failures are reported as `pearl::Error`, which carries a machine
 * readable kind plus an optional numeric payload (a residual, a holonomy,
 * a loop integral) so callers can report the offending quantity.
 */
#ifndef PEARL_FLOER_ERRORS_HPP
#define PEARL_FLOER_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace pearl {

enum class ErrorKind
{
    NotLagrangian,
    Degenerate,
    InvalidFrame,
    NotTransverse,
    DimensionMismatch,
    NotExact,
    NotGraded,
    NonTransverseDoublePoint,
    TripleOrWorse,
    IndexNotIntegral,
    DegreeViolation,
    NotAComplex,
    ShapeMismatch,
    NotChainMap,
    FiltrationViolated,
    ValidationFailed,
    InconsistentPattern,
    InvalidArgument,
    Parse,
    Io,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NotLagrangian: return "NotLagrangian";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::InvalidFrame: return "InvalidFrame";
    case ErrorKind::NotTransverse: return "NotTransverse";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotExact: return "NotExact";
    case ErrorKind::NotGraded: return "NotGraded";
    case ErrorKind::NonTransverseDoublePoint: return "NonTransverseDoublePoint";
    case ErrorKind::TripleOrWorse: return "TripleOrWorse";
    case ErrorKind::IndexNotIntegral: return "IndexNotIntegral";
    case ErrorKind::DegreeViolation: return "DegreeViolation";
    case ErrorKind::NotAComplex: return "NotAComplex";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotChainMap: return "NotChainMap";
    case ErrorKind::FiltrationViolated: return "FiltrationViolated";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::InconsistentPattern: return "InconsistentPattern";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& message, double value = 0.0)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          value_(value)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

    // Offending quantity, when one exists (loop residual, holonomy, ...).
    double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    double value_;
};

} // namespace pearl

#endif
