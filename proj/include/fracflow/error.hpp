#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracflow {

enum class ErrorKind {
    NotConvex,
    DegenerateEdge,
    NotSimple,
    TooFewPoints,
    NonUnitDirection,
    SolverFailure,
    InvalidOrder,
    WindowTooLarge,
    PointNotOnBoundary,
    SeedRequired,
    CalibrationMissing,
    StepCollapse,
    CurveDegenerate,
    NumericalBreakdown,
    PastExtinction,
    GridMismatch,
    PreconditionViolated,
    CenterOutside,
    AlphaTooLarge,
    WindowTooShort,
    ResamplingInsideWindow,
    ConfigInvalid,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace fracflow
