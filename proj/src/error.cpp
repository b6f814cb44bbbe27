#include "fracflow/error.hpp"

namespace fracflow {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotConvex: return "NotConvex";
        case ErrorKind::DegenerateEdge: return "DegenerateEdge";
        case ErrorKind::NotSimple: return "NotSimple";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::NonUnitDirection: return "NonUnitDirection";
        case ErrorKind::SolverFailure: return "SolverFailure";
        case ErrorKind::InvalidOrder: return "InvalidOrder";
        case ErrorKind::WindowTooLarge: return "WindowTooLarge";
        case ErrorKind::PointNotOnBoundary: return "PointNotOnBoundary";
        case ErrorKind::SeedRequired: return "SeedRequired";
        case ErrorKind::CalibrationMissing: return "CalibrationMissing";
        case ErrorKind::StepCollapse: return "StepCollapse";
        case ErrorKind::CurveDegenerate: return "CurveDegenerate";
        case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
        case ErrorKind::PastExtinction: return "PastExtinction";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::PreconditionViolated: return "PreconditionViolated";
        case ErrorKind::CenterOutside: return "CenterOutside";
        case ErrorKind::AlphaTooLarge: return "AlphaTooLarge";
        case ErrorKind::WindowTooShort: return "WindowTooShort";
        case ErrorKind::ResamplingInsideWindow: return "ResamplingInsideWindow";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace fracflow
