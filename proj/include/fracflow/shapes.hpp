#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fracflow/geometry.hpp"

namespace fracflow {

/// N points at equal angles on a circle, starting at angle 0.
std::vector<Vec2> circle_points(double radius, std::size_t n, Vec2 center = {});

/// N points equidistributed in arc length on the ellipse x^2/a^2 + y^2/b^2 = 1,
/// starting at (a, 0).
std::vector<Vec2> ellipse_points(double a, double b, std::size_t n, Vec2 center = {});

/// Regular k-gon of circumradius a with corners rounded by radius b (the
/// Minkowski sum of the polygon and a disk of radius b), equal arc spacing.
std::vector<Vec2> rounded_polygon_points(int sides, double a, double b, std::size_t n);

/// Seed description used by the config file and the --shape flag.
struct ShapeSpec {
    std::string kind{"ellipse"};  // circle | ellipse | rounded | file
    double a{2.0};                // circle radius, ellipse semi-axis, polygon circumradius
    double b{1.0};                // ellipse semi-axis, rounding radius
    int sides{4};
    std::string path;             // JSONL seed for kind == file

    bool operator==(const ShapeSpec&) const = default;
};

/// Parses "circle:R", "ellipse:A,B", "rounded:K,A,B" or "file:PATH".
/// Throws Error{ConfigInvalid}.
ShapeSpec parse_shape_spec(const std::string& text);

ConvexCurve make_seed(const ShapeSpec& spec, std::size_t n);

}  // namespace fracflow
