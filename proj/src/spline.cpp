#include "fracflow/spline.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "fracflow/error.hpp"

namespace fracflow {
namespace {

// Thomas algorithm for a[k] x[k-1] + b[k] x[k] + c[k] x[k+1] = r[k] (a[0], c[n-1] unused).
template <class T>
std::vector<T> solve_tridiagonal(const std::vector<double>& a, std::vector<double> b,
                                 const std::vector<double>& c, std::vector<T> r) {
    const std::size_t n = b.size();
    for (std::size_t k = 1; k < n; ++k) {
        const double m = a[k] / b[k - 1];
        b[k] -= m * c[k - 1];
        r[k] -= m * r[k - 1];
    }
    std::vector<T> x(n);
    x[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) x[k] = (r[k] - c[k] * x[k + 1]) / b[k];
    return x;
}

// Cyclic variant (a[0] couples x[n-1], c[n-1] couples x[0]) via Sherman-Morrison.
template <class T>
std::vector<T> solve_cyclic_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                        const std::vector<double>& c, const std::vector<T>& r) {
    const std::size_t n = b.size();
    const double gamma = -b[0];
    std::vector<double> bb = b;
    bb[0] = b[0] - gamma;
    bb[n - 1] = b[n - 1] - a[0] * c[n - 1] / gamma;

    const std::vector<T> x = solve_tridiagonal(a, bb, c, r);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = c[n - 1];
    const std::vector<double> z = solve_tridiagonal(a, bb, c, u);

    const double denom = 1.0 + z[0] + a[0] * z[n - 1] / gamma;
    const T numer = x[0] + a[0] * x[n - 1] / gamma;
    const T factor = numer / denom;
    std::vector<T> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = x[k] - z[k] * factor;
    return out;
}

}  // namespace

PeriodicSpline::PeriodicSpline(std::span<const Vec2> points) {
    const std::size_t n = points.size();
    if (n < 3) throw Error(ErrorKind::TooFewPoints, "periodic spline needs at least 3 points");

    std::vector<double> h(n);
    knots_.resize(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        h[k] = norm(points[(k + 1) % n] - points[k]);
        if (!(h[k] > 0.0)) throw Error(ErrorKind::DegenerateEdge, "repeated point in spline input");
        knots_[k + 1] = knots_[k] + h[k];
    }

    std::vector<double> a(n), b(n), c(n);
    std::vector<Vec2> r(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t km = (k + n - 1) % n;
        const std::size_t kp = (k + 1) % n;
        a[k] = h[km];
        b[k] = 2.0 * (h[km] + h[k]);
        c[k] = h[k];
        r[k] = 6.0 * ((points[kp] - points[k]) / h[k] - (points[k] - points[km]) / h[km]);
    }
    const std::vector<Vec2> m = solve_cyclic_tridiagonal(a, b, c, r);

    segments_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t kp = (k + 1) % n;
        Segment& seg = segments_[k];
        seg.h = h[k];
        seg.p = points[k];
        seg.b = (points[kp] - points[k]) / h[k] - h[k] * (2.0 * m[k] + m[kp]) / 6.0;
        seg.c = 0.5 * m[k];
        seg.e = (m[kp] - m[k]) / (6.0 * h[k]);
    }

    arc_knots_.resize(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) arc_knots_[k + 1] = arc_knots_[k] + segment_arc_length(k, h[k]);
}

std::pair<std::size_t, double> PeriodicSpline::locate(double t) const {
    const double p = period();
    t = std::fmod(t, p);
    if (t < 0.0) t += p;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t k = static_cast<std::size_t>(std::distance(knots_.begin(), it));
    k = k == 0 ? 0 : k - 1;
    if (k >= size()) k = size() - 1;
    return {k, t - knots_[k]};
}

Vec2 PeriodicSpline::value(double t) const {
    const auto [k, d] = locate(t);
    return segments_[k].value(d);
}

Vec2 PeriodicSpline::derivative(double t) const {
    const auto [k, d] = locate(t);
    return segments_[k].first(d);
}

double PeriodicSpline::segment_arc_length(std::size_t k, double d) const {
    const Segment& seg = segments_[k];
    return boost::math::quadrature::gauss<double, 10>::integrate(
        [&seg](double x) { return norm(seg.first(x)); }, 0.0, d);
}

double PeriodicSpline::parameter_at_arc(double arc) const {
    const double total = total_length();
    arc = std::fmod(arc, total);
    if (arc < 0.0) arc += total;
    auto it = std::upper_bound(arc_knots_.begin(), arc_knots_.end(), arc);
    std::size_t k = static_cast<std::size_t>(std::distance(arc_knots_.begin(), it));
    k = k == 0 ? 0 : std::min(k - 1, size() - 1);

    const Segment& seg = segments_[k];
    const double target = arc - arc_knots_[k];
    const double seg_len = arc_knots_[k + 1] - arc_knots_[k];
    // Newton on the monotone local arc length, safeguarded by bisection.
    double lo = 0.0, hi = seg.h;
    double d = seg.h * std::clamp(target / seg_len, 0.0, 1.0);
    for (int iter = 0; iter < 60; ++iter) {
        const double f = segment_arc_length(k, d) - target;
        if (f > 0.0) hi = d; else lo = d;
        const double speed = norm(seg.first(d));
        double next = d - f / speed;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - d) <= 1e-15 * seg.h) { d = next; break; }
        d = next;
    }
    return knots_[k] + d;
}

}  // namespace fracflow
