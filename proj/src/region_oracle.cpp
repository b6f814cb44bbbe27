#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "fracflow/error.hpp"
#include "fracflow/nonlocal.hpp"
#include "fracflow/spline.hpp"

// Region form of H_s at a node x of the spline boundary. With P the tangent
// half-plane at x (which contains E), chi~_E - chi~_P = 2 on P \ E and zero
// elsewhere, while the p.v. integral of chi~_P vanishes by symmetry. A ray
// leaving x at angle phi in (0, pi) from the tangent stays in E up to the
// chord length L(phi) and then in P \ E, so the radial integral is
//   int_L^inf r^{-1-s} dr = L^{-s} / s   and   H_s = 2(1-s) int_0^pi L(phi)^{-s} dphi.
// The angular integral is split at the knot angles (smooth pieces); L(phi) is
// found by root finding on the chord angle along the spline.

namespace fracflow {
namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

class ChordAngles {
public:
    ChordAngles(const PeriodicSpline& spline, std::size_t node, bool forward)
        : spline_(spline), n_(spline.size()), node_(node), forward_(forward) {
        const auto& first = spline_.segment(node_);
        x_ = first.p;
        b0_ = first.b;
    }

    // Segment walked at rank r: forward from the node, or backward ending at it.
    const PeriodicSpline::Segment& seg(std::size_t r) const {
        return spline_.segment(forward_ ? (node_ + r) % n_ : (node_ + n_ - 1 - r) % n_);
    }

    // Positive multiple q of the chord u = y - x (u = scale * q) for the point
    // at distance delta (parameter units) into rank r, counted from the end
    // nearest the node. Ranks adjacent to the node use exact Taylor forms in
    // the offset d from x, so nothing cancels or underflows as d -> 0.
    Vec2 direction(std::size_t r, double delta, double& scale) const {
        const auto& sg = seg(r);
        const bool starts_at_node = forward_ ? r == 0 : r + 1 == n_;
        const bool ends_at_node = forward_ ? r + 1 == n_ : r == 0;
        if (starts_at_node) {
            // y - x = d (b + c d + e d^2)
            const double d = forward_ ? delta : sg.h - delta;
            scale = d;
            return b0_ + d * (sg.c + d * sg.e);
        }
        if (ends_at_node) {
            // y - x = -d (S'(h) - d S''(h) / 2 + d^2 e), d measured back from x
            const double d = forward_ ? sg.h - delta : delta;
            scale = d;
            return -(b0_ - 0.5 * d * sg.second(sg.h) + (d * d) * sg.e);
        }
        scale = 1.0;
        return sg.value(forward_ ? delta : sg.h - delta) - x_;
    }

    double chord_length(std::size_t r, double delta) const {
        double scale = 0.0;
        const Vec2 q = direction(r, delta, scale);
        return scale * norm(q);
    }

    // Angle of the chord from the tangent (forward) or from minus the tangent
    // (backward), measured into the interior. Taken against b0 itself so that
    // cross(b0, b0) is exactly zero.
    double angle(std::size_t r, double delta) const {
        double scale = 0.0;
        const Vec2 q = direction(r, delta, scale);
        const double c = cross(b0_, q);
        const double d = dot(b0_, q);
        return std::atan2(c, forward_ ? d : -d);
    }

    // Local offset delta in rank r whose chord angle equals phi.
    double solve(std::size_t r, double phi) const {
        const double h = seg(r).h;
        auto f = [&](double delta) { return angle(r, delta) - phi; };
        double fa = r == 0 ? -phi : f(0.0);
        double fb = f(h);
        if (fa >= 0.0) return 0.0;
        if (fb <= 0.0) return h;
        std::uintmax_t iters = 200;
        auto tol = [](double a, double b) {
            return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
        };
        const auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, h, fa, fb, tol, iters);
        return 0.5 * (lo + hi);
    }

    std::size_t size() const { return n_; }

private:
    const PeriodicSpline& spline_;
    std::size_t n_;
    std::size_t node_;
    bool forward_;
    Vec2 x_;
    Vec2 b0_;
};

// int_0^{pi/2} L(phi)^{-s} dphi over the chords on one side of the node.
double half_integral(const PeriodicSpline& spline, std::size_t node, bool forward, double s) {
    const ChordAngles ca(spline, node, forward);
    const std::size_t n = ca.size();
    auto integrand = [&](std::size_t r, double phi) {
        const double delta = ca.solve(r, phi);
        return std::pow(ca.chord_length(r, delta), -s);
    };

    double total = 0.0;
    double phi_lo = 0.0;
    for (std::size_t r = 0; r < n && phi_lo < kHalfPi; ++r) {
        const double phi_end = ca.angle(r, ca.seg(r).h);
        const double phi_hi = std::min(phi_end, kHalfPi);
        if (phi_hi <= phi_lo) continue;
        auto f = [&](double phi) { return integrand(r, phi); };
        if (r == 0) {
            // L ~ phi near the node: endpoint singularity phi^{-s}.
            boost::math::quadrature::tanh_sinh<double> ts(12);
            total += ts.integrate(f, phi_lo, phi_hi, 1e-14);
        } else {
            total += boost::math::quadrature::gauss<double, 15>::integrate(f, phi_lo, phi_hi);
        }
        phi_lo = phi_hi;
    }
    return total;
}

}  // namespace

double h_s_region(const ConvexCurve& curve, FractionalOrder s, Vec2 x) {
    const auto& p = curve.points();
    std::size_t node = p.size();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (norm(p[i] - x) <= 1e-12 * curve.diameter()) {
            node = i;
            break;
        }
    }
    if (node == p.size()) throw Error(ErrorKind::PointNotOnBoundary, "x is not a node of the curve");

    const PeriodicSpline spline(p);
    const double forward = half_integral(spline, node, true, s);
    const double backward = half_integral(spline, node, false, s);
    return 2.0 * (1.0 - s) * (forward + backward);
}

}  // namespace fracflow
