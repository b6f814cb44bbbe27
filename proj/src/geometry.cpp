#include "fracflow/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fracflow/error.hpp"
#include "fracflow/spline.hpp"

namespace fracflow {
namespace {

double mean_edge_length(std::span<const Vec2> pts) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) total += norm(pts[(i + 1) % pts.size()] - pts[i]);
    return total / static_cast<double>(pts.size());
}

// Twice the triangle area (a, b, c); positive for a counterclockwise turn.
double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

struct Antipodal {
    double diameter{0.0};
    std::size_t diam_i{0}, diam_j{0};
    double min_width{0.0};
};

// Rotating calipers over a counterclockwise convex polygon.
Antipodal rotating_calipers(std::span<const Vec2> p) {
    const std::size_t n = p.size();
    Antipodal out;
    out.min_width = std::numeric_limits<double>::infinity();
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i1 = (i + 1) % n;
        while (orient(p[i], p[i1], p[(j + 1) % n]) > orient(p[i], p[i1], p[j])) j = (j + 1) % n;
        for (std::size_t cand : {i, i1}) {
            const double d = norm(p[cand] - p[j]);
            if (d > out.diameter) {
                out.diameter = d;
                out.diam_i = cand;
                out.diam_j = j;
            }
        }
        const double edge = norm(p[i1] - p[i]);
        if (edge > 0.0) out.min_width = std::min(out.min_width, orient(p[i], p[i1], p[j]) / edge);
    }
    return out;
}

double total_turning(std::span<const Vec2> p) {
    const std::size_t n = p.size();
    double turning = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = p[i] - p[(i + n - 1) % n];
        const Vec2 e1 = p[(i + 1) % n] - p[i];
        turning += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    return turning;
}

Circle circle_from_two(const Vec2& a, const Vec2& b) {
    return {0.5 * (a + b), 0.5 * norm(a - b)};
}

Circle circle_from_three(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    if (std::abs(d) < 1e-300) {
        // Collinear: the enclosing circle is spanned by the farthest pair.
        Circle best = circle_from_two(a, b);
        for (const Circle& cand : {circle_from_two(a, c), circle_from_two(b, c)})
            if (cand.radius > best.radius) best = cand;
        return best;
    }
    const Vec2 off{(ac.y * norm2(ab) - ab.y * norm2(ac)) / d, (ab.x * norm2(ac) - ac.x * norm2(ab)) / d};
    return {a + off, norm(off)};
}

bool inside(const Circle& c, const Vec2& p) {
    return norm(p - c.center) <= c.radius * (1.0 + 1e-14) + 1e-300;
}

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

// Solves m x = r by Cramer's rule; returns false when singular.
bool solve3(const Mat3& m, const Vec3& r, Vec3& x) {
    auto det3 = [](const Mat3& a) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const double det = det3(m);
    double scale = 0.0;
    for (const auto& row : m)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (!(std::abs(det) > 1e-14 * scale * scale * scale)) return false;
    for (int col = 0; col < 3; ++col) {
        Mat3 mc = m;
        for (int row = 0; row < 3; ++row) mc[row][col] = r[row];
        x[col] = det3(mc) / det;
    }
    return true;
}

}  // namespace

bool is_discretely_convex(std::span<const Vec2> pts, double tol_convex) {
    const std::size_t n = pts.size();
    if (n < 3) return false;
    const double scale = mean_edge_length(pts);
    const double floor = -tol_convex * scale * scale;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = pts[i] - pts[(i + n - 1) % n];
        const Vec2 e1 = pts[(i + 1) % n] - pts[i];
        if (cross(e0, e1) < floor) return false;
    }
    return true;
}

ConvexCurve build_curve(std::vector<Vec2> points, double tol_convex) {
    const std::size_t n = points.size();
    if (n < kMinCurvePoints)
        throw Error(ErrorKind::TooFewPoints, "need at least 16 points, got " + std::to_string(n));

    const double scale = mean_edge_length(points);
    const double floor = -tol_convex * scale * scale;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = points[i] - points[(i + n - 1) % n];
        const Vec2 e1 = points[(i + 1) % n] - points[i];
        if (cross(e0, e1) < floor)
            throw Error(ErrorKind::NotConvex, "reflex turn at vertex " + std::to_string(i));
    }
    // Locally convex with total turning 2*pi means a single positive loop.
    if (std::abs(total_turning(points) - 2.0 * std::numbers::pi) > 1e-6 || signed_area(points) <= 0.0)
        throw Error(ErrorKind::NotSimple, "curve winds more than once or has no positive area");

    ConvexCurve c;
    c.diameter_ = rotating_calipers(points).diameter;
    c.edges_.resize(n);
    c.min_edge_ = std::numeric_limits<double>::infinity();
    double perimeter = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c.edges_[i] = norm(points[(i + 1) % n] - points[i]);
        if (c.edges_[i] < 1e-12 * c.diameter_)
            throw Error(ErrorKind::DegenerateEdge, "edge " + std::to_string(i) + " has near-zero length");
        c.min_edge_ = std::min(c.min_edge_, c.edges_[i]);
        perimeter += c.edges_[i];
    }
    c.perimeter_ = perimeter;

    c.tangents_.resize(n);
    c.normals_.resize(n);
    c.weights_.resize(n);
    c.kappa_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = (i + n - 1) % n;
        const std::size_t ip = (i + 1) % n;
        const Vec2 chord = points[ip] - points[im];
        c.tangents_[i] = normalized(chord);
        c.normals_[i] = rotate_cw(c.tangents_[i]);
        c.weights_[i] = 0.5 * (c.edges_[im] + c.edges_[i]);
        c.kappa_[i] = 2.0 * cross(points[i] - points[im], points[ip] - points[i]) /
                      (c.edges_[im] * c.edges_[i] * norm(chord));
    }
    c.points_ = std::move(points);
    return c;
}

double signed_area(std::span<const Vec2> p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += cross(p[i], p[(i + 1) % p.size()]);
    return 0.5 * acc;
}

double enclosed_area(const ConvexCurve& curve) { return signed_area(curve.points()); }

Vec2 polygon_centroid(std::span<const Vec2> p) {
    // Relative to the first vertex, so translations are reproduced to rounding.
    const Vec2 origin = p[0];
    double a2 = 0.0;
    Vec2 acc;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const Vec2 u = p[i] - origin;
        const Vec2 v = p[i + 1] - origin;
        const double w = cross(u, v);
        a2 += w;
        acc += w * (u + v);
    }
    return origin + acc / (3.0 * a2);
}

Vec2 barycenter(const ConvexCurve& curve) { return polygon_centroid(curve.points()); }

double support(const ConvexCurve& curve, Vec2 omega) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : curve.points()) best = std::max(best, dot(p, omega));
    return best;
}

double width(const ConvexCurve& curve, Vec2 omega) {
    if (std::abs(norm(omega) - 1.0) > 1e-12)
        throw Error(ErrorKind::NonUnitDirection, "width direction must have unit length");
    return support(curve, omega) + support(curve, -omega);
}

Circle min_enclosing_circle(std::span<const Vec2> points) {
    std::vector<Vec2> p(points.begin(), points.end());
    std::mt19937_64 rng(0x5eedf00dULL);
    std::shuffle(p.begin(), p.end(), rng);
    Circle c{p[0], 0.0};
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (inside(c, p[i])) continue;
        c = {p[i], 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (inside(c, p[j])) continue;
            c = circle_from_two(p[i], p[j]);
            for (std::size_t k = 0; k < j; ++k)
                if (!inside(c, p[k])) c = circle_from_three(p[i], p[j], p[k]);
        }
    }
    return c;
}

Circle chebyshev_circle(const ConvexCurve& curve) {
    // Primal: max r  s.t.  n_e . c + r <= b_e for every edge e.
    // Solved through its dual  min b.y  s.t.  sum_e y_e (n_e, 1) = (0, 0, 1), y >= 0,
    // whose bases have three columns; the simplex multipliers are (c, r).
    const auto& p = curve.points();
    const std::size_t n = p.size();
    const Vec2 origin = barycenter(curve);

    std::vector<Vec3> col(n);
    std::vector<double> rhs(n);
    std::vector<double> normal_angle(n);
    for (std::size_t e = 0; e < n; ++e) {
        const Vec2 nrm = rotate_cw(normalized(p[(e + 1) % n] - p[e]));
        col[e] = {nrm.x, nrm.y, 1.0};
        rhs[e] = dot(nrm, p[e] - origin);
        normal_angle[e] = std::atan2(nrm.y, nrm.x);
    }

    auto basis_matrix = [&](const std::array<std::size_t, 3>& basis) {
        Mat3 m{};
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k) m[r][k] = col[basis[k]][r];
        return m;
    };

    // Initial basis: three edges whose normals surround the origin.
    std::array<std::size_t, 3> basis{};
    Vec3 xb{};
    bool found = false;
    for (std::size_t first = 0; first < n && !found; first += std::max<std::size_t>(1, n / 16)) {
        basis[0] = first;
        for (int k = 1; k < 3; ++k) {
            const double target = normal_angle[first] + k * 2.0 * std::numbers::pi / 3.0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t e = 0; e < n; ++e) {
                const double d = std::abs(std::remainder(normal_angle[e] - target, 2.0 * std::numbers::pi));
                if (d < best) { best = d; basis[k] = e; }
            }
        }
        found = solve3(basis_matrix(basis), {0.0, 0.0, 1.0}, xb) &&
                std::all_of(xb.begin(), xb.end(), [](double v) { return v >= 0.0; });
    }
    if (!found) throw Error(ErrorKind::SolverFailure, "no initial basis for the inscribed-circle LP");

    Vec3 z{};
    for (std::size_t iter = 0; iter < 20 * n + 100; ++iter) {
        // Multipliers: basic constraints are tight, (n_e, 1) . z = b_e.
        Mat3 bt{};
        for (int k = 0; k < 3; ++k)
            for (int r = 0; r < 3; ++r) bt[k][r] = col[basis[k]][r];
        if (!solve3(bt, {rhs[basis[0]], rhs[basis[1]], rhs[basis[2]]}, z))
            throw Error(ErrorKind::SolverFailure, "singular basis in the inscribed-circle LP");

        const double tol = 1e-13 * curve.diameter();
        std::size_t entering = n;
        double most_negative = -tol;
        for (std::size_t e = 0; e < n; ++e) {
            const double reduced = rhs[e] - (col[e][0] * z[0] + col[e][1] * z[1] + z[2]);
            if (reduced < most_negative) { most_negative = reduced; entering = e; }
        }
        if (entering == n) return {origin + Vec2{z[0], z[1]}, z[2]};

        Vec3 u{};
        if (!solve3(basis_matrix(basis), col[entering], u))
            throw Error(ErrorKind::SolverFailure, "singular pivot in the inscribed-circle LP");
        int leaving = -1;
        double ratio = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            if (u[k] > 1e-14 && xb[k] / u[k] < ratio) {
                ratio = xb[k] / u[k];
                leaving = k;
            }
        }
        if (leaving < 0) throw Error(ErrorKind::SolverFailure, "inscribed-circle LP is infeasible");
        for (int k = 0; k < 3; ++k) xb[k] -= ratio * u[k];
        xb[leaving] = ratio;
        basis[leaving] = entering;
    }
    throw Error(ErrorKind::SolverFailure, "inscribed-circle LP did not converge");
}

RadiiReport radii_report(const ConvexCurve& curve, int n_directions) {
    if (n_directions < 64) throw Error(ErrorKind::PreconditionViolated, "n_directions must be >= 64");
    RadiiReport r;
    const Circle inner = chebyshev_circle(curve);
    const Circle outer = min_enclosing_circle(curve.points());
    r.inner_radius = inner.radius;
    r.inner_center = inner.center;
    r.outer_radius = outer.radius;
    r.outer_center = outer.center;

    const Antipodal ap = rotating_calipers(curve.points());
    r.diameter = ap.diameter;
    r.min_width = ap.min_width;
    r.max_width = ap.diameter;
    for (int k = 0; k < n_directions; ++k) {
        const double theta = std::numbers::pi * k / n_directions;
        const double w = width(curve, unit_from_angle(theta));
        r.min_width = std::min(r.min_width, w);
        r.max_width = std::max(r.max_width, w);
    }
    return r;
}

ConvexCurve resample(const ConvexCurve& curve, std::size_t n_new) {
    const PeriodicSpline spline(curve.points());
    const double total = spline.total_length();
    std::vector<Vec2> pts(n_new);
    for (std::size_t k = 0; k < n_new; ++k)
        pts[k] = spline.value(spline.parameter_at_arc(total * static_cast<double>(k) / n_new));
    pts[0] = curve.point(0);

    const double target_area = enclosed_area(curve);
    const double area = signed_area(pts);
    if (!(area > 0.0)) throw Error(ErrorKind::NotConvex, "resampled curve lost orientation");
    pts = dilate(pts, polygon_centroid(pts), std::sqrt(target_area / area));
    if (!is_discretely_convex(pts))
        throw Error(ErrorKind::NotConvex, "spline interpolation overshoots; resampled curve is not convex");
    return build_curve(std::move(pts));
}

ConvexCurve resample_polygonal(const ConvexCurve& curve, std::size_t n_new) {
    const auto& p = curve.points();
    const auto& e = curve.edges();
    const double spacing = curve.perimeter() / static_cast<double>(n_new);
    std::vector<Vec2> pts(n_new);
    std::size_t edge = 0;
    double start = 0.0;  // arc length at p[edge]
    for (std::size_t k = 0; k < n_new; ++k) {
        const double target = spacing * static_cast<double>(k);
        while (edge + 1 < p.size() && start + e[edge] <= target) start += e[edge++];
        const double f = std::clamp((target - start) / e[edge], 0.0, 1.0);
        pts[k] = p[edge] + f * (p[curve.next(edge)] - p[edge]);
    }
    const double area = signed_area(pts);
    if (!(area > 0.0)) throw Error(ErrorKind::NotConvex, "resampled polygon lost orientation");
    pts = dilate(pts, polygon_centroid(pts), std::sqrt(enclosed_area(curve) / area));
    return build_curve(std::move(pts));
}

std::vector<Vec2> convex_hull(std::span<const Vec2> points) {
    std::vector<Vec2> p(points.begin(), points.end());
    std::sort(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return p;
    std::vector<Vec2> hull(2 * p.size());
    std::size_t k = 0;
    for (const Vec2& q : p) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], q) <= 0.0) --k;
        hull[k++] = q;
    }
    for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && orient(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
        hull[k++] = p[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool contains(const ConvexCurve& curve, Vec2 q, double tol) {
    const auto& p = curve.points();
    const auto& e = curve.edges();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const std::size_t j = curve.next(i);
        if (cross(p[j] - p[i], q - p[i]) < -tol * e[i]) return false;
    }
    return true;
}

std::vector<Vec2> dilate(std::span<const Vec2> points, Vec2 center, double factor) {
    std::vector<Vec2> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = center + factor * (points[i] - center);
    return out;
}

ConvexCurve scaled(const ConvexCurve& curve, double factor) {
    std::vector<Vec2> pts(curve.points());
    for (Vec2& p : pts) p *= factor;
    return build_curve(std::move(pts));
}

ConvexCurve translated(const ConvexCurve& curve, Vec2 offset) {
    std::vector<Vec2> pts(curve.points());
    for (Vec2& p : pts) p += offset;
    return build_curve(std::move(pts));
}

ConvexCurve rotated(const ConvexCurve& curve, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    std::vector<Vec2> pts(curve.points());
    for (Vec2& p : pts) p = {c * p.x - s * p.y, s * p.x + c * p.y};
    return build_curve(std::move(pts));
}

}  // namespace fracflow
