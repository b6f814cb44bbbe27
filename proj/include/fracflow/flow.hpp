#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracflow/geometry.hpp"
#include "fracflow/nonlocal.hpp"
#include "fracflow/speed.hpp"

namespace fracflow {

struct FlowConfig {
    double s{0.5};
    SpeedFunction speed{SpeedFunction::identity()};
    std::size_t n_points{512};
    double cfl{0.2};
    double t_end{1.0};
    bool renormalize_volume{true};
    /// Steps between arc-length resamplings; 0 disables resampling.
    std::size_t resample_every{25};
    KernelPolicy policy{};
    double tol_convex{kDefaultConvexTol};
    /// Abort once repairs exceed this fraction of the steps taken (and at least kMinRepairsToAbort).
    double max_repair_fraction{0.01};
    /// Off: the unforced flow V = -Phi(H_s), used for the shrinking-circle comparison.
    bool forcing_enabled{true};
    /// run() stops early once sphere_deviation drops below this; 0 disables.
    double sphere_target{0.0};
    std::size_t max_steps{2'000'000};
    std::optional<std::uint64_t> rng_seed;
    /// Imposed step sizes (one per step); used to put two runs on one time grid.
    std::vector<double> dt_schedule;

    bool operator==(const FlowConfig&) const = default;
};

inline constexpr std::size_t kMinRepairsToAbort = 3;

/// Throws Error{ConfigInvalid} naming the offending field.
void validate(const FlowConfig& config);

struct FlowEvent {
    enum class Kind { Renormalize, Resample, ConvexityRepair };
    Kind kind;
    std::size_t step;
    double time;
    /// Relative area drift before the correction (Renormalize), 0 otherwise.
    double value{0.0};
};
std::string to_string(FlowEvent::Kind kind);

struct FlowState {
    ConvexCurve curve;
    double time{0.0};
    std::vector<double> h_s;
    /// Nonlocal |A|^2 analogue and Per_s from the same kernel sweep as h_s.
    std::vector<double> a2;
    double per_s{0.0};
    double forcing{0.0};
    std::size_t step_count{0};
    std::vector<FlowEvent> event_log;

    double reference_area{0.0};
    double last_dt{0.0};
    double volume_drift_prestep{0.0};
    std::size_t repairs{0};
    bool resampled{false};
    bool repaired{false};
};

/// Arc-length weighted mean of Phi(H_s) over the curve (h(t) for the identity).
double forcing(const ConvexCurve& curve, FractionalOrder s, const SpeedFunction& speed,
               const KernelPolicy& policy = {});
/// Same, from precomputed H_s values.
double forcing(const ConvexCurve& curve, const std::vector<double>& h_s, const SpeedFunction& speed);

/// State at t = 0: H_s, |A|^2 analogue, Per_s and forcing evaluated on the seed.
FlowState initial_state(const ConvexCurve& seed, const FlowConfig& config);

/// dt = cfl * min_edge^{1+s} / max(1, max_i Phi'(H_i) |H_i|).
double stable_dt(const FlowState& state, const FlowConfig& config);

/// One explicit Euler step of x <- x + dt (-Phi(H_s) + forcing) nu, followed by
/// convexity repair (hull) if needed, volume renormalization by dilation about
/// the barycenter, and resampling on schedule. The last step is clipped to t_end.
/// Throws Error{StepCollapse | CurveDegenerate}.
FlowState step(FlowState state, const FlowConfig& config);

/// R(t) = (R0^{1+s} - (1+s) c_s t)^{1/(1+s)}, c_s the unit-circle H_s.
/// Throws Error{PastExtinction}.
double shrinking_circle(double r0, double s, double t);
double extinction_time(double r0, double s);

struct TimedCurve {
    double time;
    std::vector<Vec2> points;
};

struct ContainmentResult {
    bool holds{true};
    std::optional<std::size_t> first_violation;
};

/// Polygon containment of inner in outer at each shared time. Throws
/// Error{GridMismatch} if the times differ and Error{PreconditionViolated} if
/// inner does not start inside outer.
ContainmentResult comparison_containment(const std::vector<TimedCurve>& inner, const std::vector<TimedCurve>& outer);

}  // namespace fracflow
