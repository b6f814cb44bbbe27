#pragma once

#include <cmath>
#include <ostream>

namespace fracflow {

/// Planar position or displacement.
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double a) { x *= a; y *= a; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double k) { return a *= k; }
    friend constexpr Vec2 operator*(double k, Vec2 a) { return a *= k; }
    friend constexpr Vec2 operator/(const Vec2& a, double k) { return {a.x / k, a.y / k}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Vec2& v) {
        return os << '(' << v.x << ", " << v.y << ')';
    }
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product; positive when b is counterclockwise of a.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(const Vec2& a) { return a / norm(a); }
/// Rotation by -90 degrees. Turns the tangent of a counterclockwise curve into its outward normal.
constexpr Vec2 rotate_cw(const Vec2& a) { return {a.y, -a.x}; }
constexpr Vec2 rotate_ccw(const Vec2& a) { return {-a.y, a.x}; }
inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace fracflow
