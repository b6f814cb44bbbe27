#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "fracflow/diagnostics.hpp"
#include "fracflow/flow.hpp"
#include "fracflow/io.hpp"

namespace fracflow {

struct RunOptions {
    /// Geometry snapshot every out_stride steps (plus the first and last state); 0 keeps only those two.
    std::size_t out_stride{50};
    /// Derivative checks on windows centred between resamplings, every check_stride steps; 0 disables.
    std::size_t check_stride{25};
    /// Point tracked by the H_s check; defaults to the maximum of H_s on the seed.
    std::optional<std::size_t> tracked_point;
    /// Called after every recorded step, in time order.
    std::function<void(const FlowState&, const DiagnosticsRecord&)> on_step;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticsRecord> records;
    std::vector<DerivativeCheck> checks;
    std::vector<FlowEvent> events;
    FlowState final_state;
    std::size_t tracked_point{0};
    bool reached_target{false};
};

/// Integrates to t_end (or through dt_schedule), stopping early when
/// sphere_deviation falls below config.sphere_target. One diagnostics record
/// per step including t = 0. Throws Error{NumericalBreakdown} when convexity
/// repairs exceed the configured fraction of steps.
Trajectory run(const ConvexCurve& seed, const FlowConfig& config, const RunOptions& options = {});

}  // namespace fracflow
