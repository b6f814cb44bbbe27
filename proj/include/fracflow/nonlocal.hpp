#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fracflow/geometry.hpp"

namespace fracflow {

/// Order s of the fractional operators, strictly inside (0, 1).
/// Throws Error{InvalidOrder}; logs a warning for s <= 0.02 or s >= 0.98.
class FractionalOrder {
public:
    explicit FractionalOrder(double s);
    double value() const noexcept { return s_; }
    operator double() const noexcept { return s_; }

private:
    double s_;
};

/// Treatment of the weak singularity: the 2m+1 points centred on the
/// evaluation point are left out of the sum and replaced by an analytic
/// correction built from the local curve data.
struct KernelPolicy {
    int singular_window{2};
    bool correction_enabled{true};

    bool operator==(const KernelPolicy&) const = default;
};

/// Throws Error{WindowTooLarge} unless 1 <= m <= n/8.
void validate_policy(const KernelPolicy& policy, std::size_t n);

/// Excluded-window corrections per point, for integrands c2*sigma^2 + c1*sigma
/// against |sigma|^{-2-s}: the missing part is c2*even[i] + c1*odd[i].
/// even = -zeta(s, m+1) (D+^{1-s} + D-^{1-s}),  odd = zeta(1+s, m+1) (D-^{-s} - D+^{-s}),
/// with D+- the mean spacing over the m+1 edges on either side.
struct WindowCorrection {
    std::vector<double> even;
    std::vector<double> odd;
};
WindowCorrection window_correction(const ConvexCurve& curve, double s, int m);

/// Fractional mean curvature at point i from the boundary form
///   H_s(x) = 2(1-s) p.v. int <y-x, nu(y)> |x-y|^{-2-s} dmu(y).
double h_s_boundary(const ConvexCurve& curve, FractionalOrder s, std::size_t i, const KernelPolicy& policy = {});
std::vector<double> h_s_all(const ConvexCurve& curve, FractionalOrder s, const KernelPolicy& policy = {});

/// Derivative of H_s along the unit tangent at i:
///   2s(1-s) p.v. int nu(y).t_i |x-y|^{-2-s} dmu(y).
double h_s_tangential_derivative(const ConvexCurve& curve, FractionalOrder s, std::size_t i,
                                 const KernelPolicy& policy = {});
std::vector<double> h_s_tangential_all(const ConvexCurve& curve, FractionalOrder s, const KernelPolicy& policy = {});

/// int (1 - nu(y).nu(x)) |x-y|^{-2-s} dmu(y)
double nonlocal_a2(const ConvexCurve& curve, FractionalOrder s, std::size_t i, const KernelPolicy& policy = {});
std::vector<double> nonlocal_a2_all(const ConvexCurve& curve, FractionalOrder s, const KernelPolicy& policy = {});

/// int (f(y) - f(x)) |x-y|^{-2-s} dmu(y) for f sampled at the curve points.
double nonlocal_laplace(const ConvexCurve& curve, FractionalOrder s, std::span<const double> f, std::size_t i,
                        const KernelPolicy& policy = {});

/// Prefactor of the boundary-boundary perimeter formula
///   Per_s = C * (1-s)/s * int int nu(x).nu(y) |x-y|^{-s} dmu dmu.
/// C = 1 follows from the divergence theorem and was confirmed against the
/// Monte Carlo region estimate on the unit disk and the 2:1 ellipse.
inline constexpr double kPerimeterPrefactor = 1.0;

struct PerimeterCalibration {
    std::optional<double> prefactor;
};
inline PerimeterCalibration committed_calibration() { return {kPerimeterPrefactor}; }

/// Throws Error{CalibrationMissing} when the calibration has no prefactor.
double per_s_boundary(const ConvexCurve& curve, FractionalOrder s,
                      const PerimeterCalibration& calibration = committed_calibration(),
                      const KernelPolicy& policy = {});

struct MonteCarloEstimate {
    double value{0.0};
    double std_error{0.0};
    std::size_t samples{0};
};

/// s(1-s) int_E int_{E^c} |x-y|^{-2-s}: x uniform in the polygon (rejection
/// from the bounding box), inner integral exact edge by edge in polar
/// coordinates. Throws Error{SeedRequired} without a seed and
/// Error{PreconditionViolated} below 1e5 samples.
MonteCarloEstimate per_s_region(const ConvexCurve& curve, FractionalOrder s, std::size_t mc_samples,
                                std::optional<std::uint64_t> rng_seed);

/// Per_s^2 / |E|^{2-s}
double isoperimetric_ratio(const ConvexCurve& curve, FractionalOrder s,
                           const PerimeterCalibration& calibration = committed_calibration(),
                           const KernelPolicy& policy = {});

/// s(1-s) p.v. int chi~_E(y) |x-y|^{-2-s} dy at the curve node x, with the
/// boundary taken as the periodic cubic spline through the points. Each ray
/// from x is integrated radially in closed form; the angular integral is
/// adaptive. Throws Error{PointNotOnBoundary} if x is not a curve node.
double h_s_region(const ConvexCurve& curve, FractionalOrder s, Vec2 x);

/// H_s of the unit circle: (1-s) 2^{1-s} sqrt(pi) Gamma((1-s)/2) / Gamma(1-s/2).
double unit_circle_hs(double s);

/// Lower bound min H_s >= 2 pi (1-s) (2 R)^{-s} for a convex set inside a disk of radius R.
double hs_lower_bound(double s, double outer_radius);

/// Everything one time step and its diagnostics need, from one kernel table.
struct SweepRequest {
    bool a2{false};
    bool per_s{false};
};
struct SweepResult {
    std::vector<double> h_s;
    std::vector<double> a2;          // empty unless requested
    std::optional<double> per_s;     // empty unless requested
};
SweepResult sweep(const ConvexCurve& curve, FractionalOrder s, const KernelPolicy& policy = {},
                  SweepRequest request = {}, const PerimeterCalibration& calibration = committed_calibration());

/// Polynomial extrapolation to eps = 0 through (eps_k, value_k) (Neville).
double richardson_limit(std::span<const double> eps, std::span<const double> values);

}  // namespace fracflow
