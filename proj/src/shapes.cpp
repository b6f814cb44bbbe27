#include "fracflow/shapes.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracflow/error.hpp"
#include "fracflow/io.hpp"

namespace fracflow {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::ConfigInvalid, "shape: cannot parse " + what + " from '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::vector<Vec2> circle_points(double radius, std::size_t n, Vec2 center) {
    std::vector<Vec2> pts(n);
    for (std::size_t k = 0; k < n; ++k) pts[k] = center + radius * unit_from_angle(kTwoPi * k / n);
    return pts;
}

std::vector<Vec2> ellipse_points(double a, double b, std::size_t n, Vec2 center) {
    auto speed = [a, b](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
    auto arc = [&](double t0, double t1) { return boost::math::quadrature::gauss<double, 20>::integrate(speed, t0, t1); };
    double total = 0.0;
    for (int q = 0; q < 4; ++q)
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(speed, q * 0.25 * kTwoPi,
                                                                               (q + 1) * 0.25 * kTwoPi, 8, 1e-14);
    std::vector<Vec2> pts(n);
    double t = 0.0, arc_t = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double target = total * static_cast<double>(k) / n;
        // Newton from the previous parameter; the arc is accumulated piecewise.
        for (int iter = 0; iter < 50; ++iter) {
            const double dt = (target - arc_t) / speed(t);
            if (std::abs(dt) < 1e-15) break;
            arc_t += arc(t, t + dt);
            t += dt;
        }
        pts[k] = center + Vec2{a * std::cos(t), b * std::sin(t)};
    }
    return pts;
}

std::vector<Vec2> rounded_polygon_points(int sides, double a, double b, std::size_t n) {
    if (sides < 3 || !(a > 0.0) || !(b > 0.0))
        throw Error(ErrorKind::ConfigInvalid, "rounded polygon needs sides >= 3, a > 0, b > 0");
    const double turn = kTwoPi / sides;
    const double arc_len = b * turn;
    const double edge_len = 2.0 * a * std::sin(std::numbers::pi / sides);
    const double piece = arc_len + edge_len;
    const double total = sides * piece;

    std::vector<Vec2> pts(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = total * static_cast<double>(k) / n;
        const int j = std::min(sides - 1, static_cast<int>(s / piece));
        const double local = s - j * piece;
        const Vec2 vertex = a * unit_from_angle(turn * j);
        const double start_angle = turn * j - 0.5 * turn;
        if (local < arc_len) {
            pts[k] = vertex + b * unit_from_angle(start_angle + local / b);
        } else {
            const double normal_angle = start_angle + turn;
            const Vec2 dir = rotate_ccw(unit_from_angle(normal_angle));
            pts[k] = vertex + b * unit_from_angle(normal_angle) + (local - arc_len) * dir;
        }
    }
    return pts;
}

ShapeSpec parse_shape_spec(const std::string& text) {
    const auto colon = text.find(':');
    ShapeSpec spec;
    spec.kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    const auto parts = args.empty() ? std::vector<std::string>{} : split(args, ',');
    if (spec.kind == "circle") {
        spec.a = parts.empty() ? 1.0 : parse_number(parts[0], "radius");
    } else if (spec.kind == "ellipse") {
        if (parts.size() != 2) throw Error(ErrorKind::ConfigInvalid, "shape: ellipse expects ellipse:A,B");
        spec.a = parse_number(parts[0], "a");
        spec.b = parse_number(parts[1], "b");
    } else if (spec.kind == "rounded") {
        if (parts.size() != 3) throw Error(ErrorKind::ConfigInvalid, "shape: rounded expects rounded:K,A,B");
        spec.sides = static_cast<int>(parse_number(parts[0], "sides"));
        spec.a = parse_number(parts[1], "a");
        spec.b = parse_number(parts[2], "b");
    } else if (spec.kind == "file") {
        spec.path = args;
    } else {
        throw Error(ErrorKind::ConfigInvalid, "shape: unknown kind '" + spec.kind + "'");
    }
    return spec;
}

ConvexCurve make_seed(const ShapeSpec& spec, std::size_t n) {
    if (spec.kind == "circle") {
        if (!(spec.a > 0.0)) throw Error(ErrorKind::ConfigInvalid, "shape.a: radius must be positive");
        return build_curve(circle_points(spec.a, n));
    }
    if (spec.kind == "ellipse") {
        if (!(spec.a > 0.0) || !(spec.b > 0.0))
            throw Error(ErrorKind::ConfigInvalid, "shape.a/shape.b: semi-axes must be positive");
        return build_curve(ellipse_points(spec.a, spec.b, n));
    }
    if (spec.kind == "rounded") return build_curve(rounded_polygon_points(spec.sides, spec.a, spec.b, n));
    if (spec.kind == "file") {
        const auto snaps = read_snapshots(spec.path);
        if (snaps.empty()) throw Error(ErrorKind::Io, "no snapshot in " + spec.path);
        ConvexCurve curve = build_curve(snaps.front().points);
        return curve.size() == n ? curve : resample(curve, n);
    }
    throw Error(ErrorKind::ConfigInvalid, "shape.kind: unknown kind '" + spec.kind + "'");
}

}  // namespace fracflow
