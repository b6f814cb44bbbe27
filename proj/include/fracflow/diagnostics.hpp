#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracflow/flow.hpp"

namespace fracflow {

/// u = <x_i - x0, nu_i>. Throws Error{CenterOutside} unless x0 is strictly inside.
double support_scalar(const ConvexCurve& curve, Vec2 x0, std::size_t i);

/// W = H_s(x_i) / (u_i - alpha). Throws Error{AlphaTooLarge} if u - alpha <= 0 at any point.
double tso_w(const ConvexCurve& curve, FractionalOrder s, Vec2 x0, double alpha, std::size_t i,
             const KernelPolicy& policy = {});
/// W = Phi(H_s) / (u - alpha) at every point, from precomputed speeds.
std::vector<double> tso_w_all(const ConvexCurve& curve, std::span<const double> speed_values, Vec2 x0, double alpha);

/// Fixed centre and offset for W over a time window: x0 is the inner centre at
/// the window start, alpha a quarter of the inner radius there, and the window
/// lasts while a circle of the inner radius shrinking under the unforced flow
/// keeps at least half its radius.
struct WAnchor {
    Vec2 x0;
    double alpha{0.0};
    double t0{0.0};
    double length{0.0};
};
WAnchor make_anchor(const ConvexCurve& curve, double s, double t0);

/// max_i | |x_i - b| - rbar | / rbar, b the barycenter and rbar the mean of |x_i - b|.
double sphere_deviation(const ConvexCurve& curve);

struct DiagnosticsRecord {
    std::size_t step{0};
    double time{0.0};
    double area{0.0};
    double per_s{0.0};
    double iso_ratio{0.0};
    double rho_in{0.0};
    double rho_out{0.0};
    double radius_ratio{0.0};
    double hs_min{0.0};
    double hs_max{0.0};
    double hs_spread{0.0};
    double phi_max{0.0};
    double forcing{0.0};
    double max_w{0.0};
    double sphere_dev{0.0};
    double vol_drift{0.0};
    std::size_t repairs{0};

    // Not in the CSV; used by the checks.
    double dt{0.0};
    double mean_radius{0.0};
    double diameter{0.0};
    double hs_bound{0.0};      // 2 pi (1-s) (2 rho_out)^{-s}
    double u_min{0.0};
    double u_max{0.0};
    double alpha{0.0};
    double cs_ratio_max{0.0};  // max_i H_s / (diam^{(1-s)/2} ((1-s) a2)^{1/2})
    bool stale{false};         // forward-filled from an earlier step
};

struct RecordContext {
    std::optional<WAnchor> anchor;
};

/// Every field for the given state. The W anchor in ctx is (re)set when absent
/// or when its window has elapsed.
DiagnosticsRecord record(const FlowState& state, const FlowConfig& config, RecordContext& ctx);

struct DerivativeCheck {
    double time{0.0};
    std::string quantity;
    double fd_rate{0.0};
    double model_rate{0.0};
    /// |fd - model| / max(|fd|, |model|); 0 when both vanish.
    double rel_discrepancy{0.0};
    double abs_discrepancy{0.0};
    /// Time between the first and last state of the window.
    double span{0.0};
};

/// Centred difference of Per_s over states 0 and 2 against int H_s V dmu at
/// state 1. Throws Error{WindowTooShort}.
DerivativeCheck check_eqper(std::span<const FlowState> window, const FlowConfig& config);

/// Right-hand side of the H_s evolution at point i for the normal speed
/// V = -Phi(H_s) + forcing: 2s(1-s) [ -int (V(y) - V(x)) K - V(x) a2(x) ].
double eqh_model(const FlowState& state, const FlowConfig& config, const SpeedFunction& speed, std::size_t i);

/// Centred difference of H_s at point i against eqh_model at the middle state.
/// Throws Error{WindowTooShort | ResamplingInsideWindow}.
DerivativeCheck check_eqh(std::span<const FlowState> window, const FlowConfig& config, std::size_t i);

/// Centred difference of the area against int V dmu. Throws
/// Error{WindowTooShort}, and Error{PreconditionViolated} with renormalization on.
DerivativeCheck check_volume_rate(std::span<const FlowState> window, const FlowConfig& config);

void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& rec);
void write_check_header(std::ostream& os);
void write_check_row(std::ostream& os, const DerivativeCheck& check);

}  // namespace fracflow
