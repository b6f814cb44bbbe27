#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracflow/vec2.hpp"

namespace fracflow {

inline constexpr std::size_t kMinCurvePoints = 16;
inline constexpr double kDefaultConvexTol = 1e-10;

/// Counterclockwise polygonal sampling of a closed convex curve together with
/// the per-point data the boundary quadratures need. Immutable once built;
/// obtain one through build_curve().
class ConvexCurve {
public:
    std::size_t size() const noexcept { return points_.size(); }

    const std::vector<Vec2>& points() const noexcept { return points_; }
    /// Unit tangents from centered differences of the neighbours.
    const std::vector<Vec2>& tangents() const noexcept { return tangents_; }
    /// Unit outward normals (tangent rotated by -90 degrees).
    const std::vector<Vec2>& normals() const noexcept { return normals_; }
    /// Arc-length quadrature weights: half the sum of the two adjacent edges.
    const std::vector<double>& weights() const noexcept { return weights_; }
    /// Menger curvature of consecutive triples.
    const std::vector<double>& kappa() const noexcept { return kappa_; }
    /// Length of edge i -> i+1 (periodic).
    const std::vector<double>& edges() const noexcept { return edges_; }

    const Vec2& point(std::size_t i) const { return points_[i]; }
    double perimeter() const noexcept { return perimeter_; }
    double diameter() const noexcept { return diameter_; }
    double min_edge() const noexcept { return min_edge_; }
    double mean_edge() const noexcept { return perimeter_ / static_cast<double>(size()); }

    std::size_t next(std::size_t i) const noexcept { return i + 1 == size() ? 0 : i + 1; }
    std::size_t prev(std::size_t i) const noexcept { return i == 0 ? size() - 1 : i - 1; }

private:
    friend ConvexCurve build_curve(std::vector<Vec2> points, double tol_convex);

    std::vector<Vec2> points_;
    std::vector<Vec2> tangents_;
    std::vector<Vec2> normals_;
    std::vector<double> weights_;
    std::vector<double> kappa_;
    std::vector<double> edges_;
    double perimeter_{0.0};
    double diameter_{0.0};
    double min_edge_{0.0};
};

/// Validates the sampling and derives tangents, normals, weights and curvature.
/// Throws Error{TooFewPoints | NotConvex | NotSimple | DegenerateEdge}.
ConvexCurve build_curve(std::vector<Vec2> points, double tol_convex = kDefaultConvexTol);

/// Discrete convexity: every turn satisfies cross(e_prev, e_next) >= -tol * mean_edge^2.
bool is_discretely_convex(std::span<const Vec2> points, double tol_convex = kDefaultConvexTol);

/// Shoelace area, positive for counterclockwise input.
double signed_area(std::span<const Vec2> points);
double enclosed_area(const ConvexCurve& curve);

/// Area-weighted centroid of the enclosed polygon.
Vec2 polygon_centroid(std::span<const Vec2> points);
Vec2 barycenter(const ConvexCurve& curve);

/// max_k <x_k, omega>
double support(const ConvexCurve& curve, Vec2 omega);
/// support(omega) + support(-omega). Throws Error{NonUnitDirection}.
double width(const ConvexCurve& curve, Vec2 omega);

struct Circle {
    Vec2 center;
    double radius{0.0};
};

/// Smallest circle containing every point (Welzl, deterministic shuffle).
Circle min_enclosing_circle(std::span<const Vec2> points);

/// Largest circle inside the polygon: Chebyshev center of the edge half-planes,
/// solved as a three-variable linear program. Throws Error{SolverFailure}.
Circle chebyshev_circle(const ConvexCurve& curve);

struct RadiiReport {
    double inner_radius{0.0};
    Vec2 inner_center;
    double outer_radius{0.0};
    Vec2 outer_center;
    double min_width{0.0};
    double max_width{0.0};
    double diameter{0.0};
};

/// Inner/outer radii (exact for the polygon) and widths. Widths are sampled
/// over n_directions uniform directions and complemented by the exact
/// extremal directions (edge normals for the minimum, the diameter chord for
/// the maximum).
RadiiReport radii_report(const ConvexCurve& curve, int n_directions = 64);

/// Equidistributes n_new points in arc length along the periodic cubic spline
/// through the curve, then dilates about the centroid so the polygon area is
/// unchanged. The first output point coincides with the first input point
/// before dilation. Throws Error{NotConvex} if the interpolant overshoots.
ConvexCurve resample(const ConvexCurve& curve, std::size_t n_new);
/// Same equidistribution along the polygon itself. Never overshoots, so the
/// result is convex whenever the input is; corners are cut by at most one spacing.
ConvexCurve resample_polygonal(const ConvexCurve& curve, std::size_t n_new);

/// Andrew's monotone chain, counterclockwise, collinear points dropped.
std::vector<Vec2> convex_hull(std::span<const Vec2> points);

/// Point-in-convex-polygon test; points within tol of an edge line count as inside.
bool contains(const ConvexCurve& curve, Vec2 p, double tol = 0.0);

/// Rigid motion / dilation helpers, used for equivariance checks and renormalization.
std::vector<Vec2> dilate(std::span<const Vec2> points, Vec2 center, double factor);
ConvexCurve scaled(const ConvexCurve& curve, double factor);
ConvexCurve translated(const ConvexCurve& curve, Vec2 offset);
ConvexCurve rotated(const ConvexCurve& curve, double angle);

}  // namespace fracflow
