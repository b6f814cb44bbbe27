#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracflow/vec2.hpp"

namespace fracflow {

/// Closed C2 cubic spline through an ordered point loop, parametrized by
/// cumulative chord length. Segment k runs over [knot(k), knot(k+1)] and is
///   S_k(d) = p_k + b_k d + c_k d^2 + e_k d^3,   0 <= d <= h_k.
class PeriodicSpline {
public:
    struct Segment {
        Vec2 p;
        Vec2 b;
        Vec2 c;
        Vec2 e;
        double h{0.0};

        Vec2 value(double d) const { return p + d * (b + d * (c + d * e)); }
        Vec2 first(double d) const { return b + d * (2.0 * c + 3.0 * d * e); }
        Vec2 second(double d) const { return 2.0 * c + 6.0 * d * e; }
    };

    explicit PeriodicSpline(std::span<const Vec2> points);

    std::size_t size() const noexcept { return segments_.size(); }
    double period() const noexcept { return knots_.back(); }
    double knot(std::size_t k) const { return knots_[k]; }
    const Segment& segment(std::size_t k) const { return segments_[k]; }

    /// Segment index and local offset for any (wrapped) parameter value.
    std::pair<std::size_t, double> locate(double t) const;

    Vec2 value(double t) const;
    Vec2 derivative(double t) const;

    /// Arc length of segment k between local offsets 0 and d (Gauss-Legendre).
    double segment_arc_length(std::size_t k, double d) const;
    /// Cumulative arc length at every knot; last entry is the total length.
    const std::vector<double>& arc_knots() const noexcept { return arc_knots_; }
    double total_length() const noexcept { return arc_knots_.back(); }
    /// Parameter value at which the arc length from knot 0 equals `arc`.
    double parameter_at_arc(double arc) const;

private:
    std::vector<double> knots_;
    std::vector<Segment> segments_;
    std::vector<double> arc_knots_;
};

}  // namespace fracflow
