#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "fracflow/error.hpp"
#include "fracflow/nonlocal.hpp"
#include "fracflow/shapes.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace fracflow;
using fracflow::test::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Io;
}

ConvexCurve unit_circle(std::size_t n) { return build_curve(circle_points(1.0, n)); }
ConvexCurve ellipse21(std::size_t n) { return build_curve(ellipse_points(2.0, 1.0, n)); }

ConvexCurve lopsided(std::size_t n) { return test::egg(n); }

double max_rel_spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / std::abs(*lo);
}

}  // namespace

TEST_CASE("fractional order and kernel policy validation") {
    for (double bad : {0.0, 1.0, 1.2, -0.1, std::nan("")})
        CHECK(kind_of([&] { FractionalOrder{bad}; }) == ErrorKind::InvalidOrder);
    CHECK(FractionalOrder(0.5).value() == 0.5);
    const ConvexCurve c = unit_circle(64);
    CHECK(kind_of([&] { h_s_boundary(c, FractionalOrder(0.5), 0, {9, true}); }) == ErrorKind::WindowTooLarge);
    CHECK(kind_of([&] { h_s_boundary(c, FractionalOrder(0.5), 0, {0, true}); }) == ErrorKind::WindowTooLarge);
    CHECK_NOTHROW(h_s_boundary(c, FractionalOrder(0.5), 0, {8, true}));
}

TEST_CASE("closed-form unit circle value agrees with the frozen quadrature oracle") {
    for (const auto& e : oracle::kUnitCircleHs) CHECK(rel_err(unit_circle_hs(e.s), e.value) < 1e-13);
}

TEST_CASE("unit circle H_s") {
    const ConvexCurve c = unit_circle(1024);
    const auto h = h_s_all(c, FractionalOrder(0.5));
    CHECK(max_rel_spread(h) < 1e-6);
    for (double v : h) CHECK(rel_err(v, oracle::unit_circle_hs(0.5)) < 5e-6);
    for (double s : {0.1, 0.25, 0.75, 0.9})
        CHECK(rel_err(h_s_boundary(c, FractionalOrder(s), 17), oracle::unit_circle_hs(s)) < 1e-5);
}

TEST_CASE("H_s scales like R^{-s} on circles") {
    for (double s : {0.25, 0.5, 0.75}) {
        const double h1 = h_s_boundary(unit_circle(512), FractionalOrder(s), 0);
        for (double r : {0.5, 2.0, 5.0}) {
            const double hr = h_s_boundary(build_curve(circle_points(r, 512)), FractionalOrder(s), 0);
            CHECK(rel_err(hr, h1 * std::pow(r, -s)) < 1e-12);
        }
    }
}

TEST_CASE("ellipse extrema sit at the axis points, by both routes") {
    const std::size_t n = 512;
    const ConvexCurve e = ellipse21(n);
    const auto h = h_s_all(e, FractionalOrder(0.5));
    std::vector<double> region;
    for (std::size_t k = 0; k < 8; ++k) region.push_back(h_s_region(e, FractionalOrder(0.5), e.point(k * n / 8)));
    const auto rmax = std::max_element(region.begin(), region.end()) - region.begin();
    const auto rmin = std::min_element(region.begin(), region.end()) - region.begin();
    CHECK((rmax == 0 || rmax == 4));
    CHECK((rmin == 2 || rmin == 6));
    const auto bmax = static_cast<std::size_t>(std::max_element(h.begin(), h.end()) - h.begin());
    const auto bmin = static_cast<std::size_t>(std::min_element(h.begin(), h.end()) - h.begin());
    CHECK((bmax == 0 || bmax == n / 2));
    CHECK((bmin == n / 4 || bmin == 3 * n / 4));
}

TEST_CASE("region oracle") {
    const ConvexCurve c = unit_circle(1024);
    CHECK(rel_err(h_s_region(c, FractionalOrder(0.5), c.point(3)), h_s_boundary(c, FractionalOrder(0.5), 3)) < 1e-3);
    CHECK(rel_err(h_s_region(c, FractionalOrder(0.5), c.point(3)), oracle::unit_circle_hs(0.5)) < 1e-6);
    CHECK(h_s_region(c, FractionalOrder(0.9), c.point(0)) > 0.0);
    CHECK(h_s_region(c, FractionalOrder(0.1), c.point(0)) > 0.0);

    // Nearly flat boundary. At s = 0.75 the exact value is 1e-3 of the unit circle's.
    const ConvexCurve big = build_curve(circle_points(1e4, 1024));
    CHECK(h_s_region(big, FractionalOrder(0.75), big.point(0)) <= 1e-2 * oracle::unit_circle_hs(0.75));

    CHECK(kind_of([&] { h_s_region(c, FractionalOrder(0.5), {0.0, 0.0}); }) == ErrorKind::PointNotOnBoundary);
}

TEST_CASE("boundary and region routes agree") {
    for (double s : {0.25, 0.5, 0.75}) {
        for (const ConvexCurve& c : {unit_circle(512), ellipse21(512), lopsided(512)}) {
            const auto h = h_s_all(c, FractionalOrder(s));
            for (std::size_t k = 0; k < 8; ++k) {
                const std::size_t i = k * 64 + 5;
                CHECK(rel_err(h[i], h_s_region(c, FractionalOrder(s), c.point(i))) < 1e-3);
            }
        }
    }
}

TEST_CASE("dropping the window correction breaks agreement") {
    const ConvexCurve c = ellipse21(1024);
    const double region = h_s_region(c, FractionalOrder(0.5), c.point(0));
    CHECK(rel_err(h_s_boundary(c, FractionalOrder(0.5), 0, {2, false}), region) > 1e-2);
}

TEST_CASE("h_s_all") {
    const ConvexCurve e = lopsided(300);
    const auto h = h_s_all(e, FractionalOrder(0.4));
    for (std::size_t i = 0; i < e.size(); i += 7) CHECK(std::abs(h[i] - h_s_boundary(e, FractionalOrder(0.4), i)) <= 1e-14 * h[i]);

    // Relabelling the points rotates the list.
    std::vector<Vec2> shifted(e.points().begin() + 41, e.points().end());
    shifted.insert(shifted.end(), e.points().begin(), e.points().begin() + 41);
    const auto hs = h_s_all(build_curve(shifted), FractionalOrder(0.4));
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(rel_err(hs[i], h[(i + 41) % e.size()]) < 1e-12);

    // Rigid motions.
    const auto hr = h_s_all(translated(rotated(e, 1.3), {5.0, -2.0}), FractionalOrder(0.4));
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(rel_err(hr[i], h[i]) < 1e-10);
}

TEST_CASE("results do not depend on the worker count") {
    const ConvexCurve e = lopsided(400);
    setenv("FRACFLOW_THREADS", "1", 1);
    const auto one = sweep(e, FractionalOrder(0.5), {}, {true, true});
    setenv("FRACFLOW_THREADS", "4", 1);
    const auto four = sweep(e, FractionalOrder(0.5), {}, {true, true});
    unsetenv("FRACFLOW_THREADS");
    CHECK(one.h_s == four.h_s);
    CHECK(one.a2 == four.a2);
    CHECK(*one.per_s == *four.per_s);
}

TEST_CASE("resolution convergence on the unit circle") {
    const double exact = oracle::unit_circle_hs(0.5);
    double prev = 0.0;
    for (std::size_t n : {128, 256, 512, 1024}) {
        const double err = std::abs(h_s_boundary(unit_circle(n), FractionalOrder(0.5), 0) - exact);
        if (prev > 0.0) CHECK(prev / err >= 2.0);
        prev = err;
    }
    // Successive differences shrink as well.
    std::vector<double> v;
    for (std::size_t n : {128, 256, 512, 1024}) v.push_back(h_s_boundary(unit_circle(n), FractionalOrder(0.5), 0));
    CHECK(std::abs(v[1] - v[0]) / std::abs(v[2] - v[1]) >= 2.0);
    CHECK(std::abs(v[2] - v[1]) / std::abs(v[3] - v[2]) >= 2.0);
}

TEST_CASE("lower bound from the circumscribed disk") {
    for (double s : {0.25, 0.5, 0.75}) {
        for (const ConvexCurve& c : {unit_circle(256), ellipse21(256), lopsided(256)}) {
            const auto h = h_s_all(c, FractionalOrder(s));
            const double hmin = *std::min_element(h.begin(), h.end());
            CHECK(hmin >= hs_lower_bound(s, radii_report(c).outer_radius) - 1e-3 * hmin);
        }
    }
}

TEST_CASE("tangential derivative") {
    const double cs = oracle::unit_circle_hs(0.5);
    const ConvexCurve c = unit_circle(512);
    for (std::size_t i = 0; i < 512; i += 37)
        CHECK(std::abs(h_s_tangential_derivative(c, FractionalOrder(0.5), i)) <= 5e-4 * cs);

    // Against a centred difference of h_s_all along arc length.
    const std::size_t n = 1024;
    const ConvexCurve e = ellipse21(n);
    const auto h = h_s_all(e, FractionalOrder(0.5));
    const auto d = h_s_tangential_all(e, FractionalOrder(0.5));
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    int checked = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(d[i]) < 0.1 * dmax) continue;
        const std::size_t ip = e.next(i), im = e.prev(i);
        const double fd = (h[ip] - h[im]) / (e.edges()[im] + e.edges()[i]);
        CHECK(rel_err(d[i], fd) < 0.02);
        ++checked;
    }
    CHECK(checked > n / 2);
    CHECK(h_s_tangential_derivative(e, FractionalOrder(0.5), n / 8) < 0.0);

    // Mirror image about the x-axis, reordered to stay counterclockwise.
    const ConvexCurve l = lopsided(400);
    std::vector<Vec2> mirror(400);
    for (std::size_t k = 0; k < 400; ++k) {
        const Vec2 p = l.point((400 - k) % 400);
        mirror[k] = {p.x, -p.y};
    }
    const auto dl = h_s_tangential_all(l, FractionalOrder(0.5));
    const auto dm = h_s_tangential_all(build_curve(mirror), FractionalOrder(0.5));
    for (std::size_t k = 0; k < 400; ++k) CHECK(std::abs(dm[k] + dl[(400 - k) % 400]) < 1e-10);
}

TEST_CASE("perimeter: boundary formula against the frozen disk oracle") {
    for (const auto& e : oracle::kUnitDiskPerS)
        CHECK(rel_err(per_s_boundary(unit_circle(1024), FractionalOrder(e.s)), e.value) < 1e-5);
    CHECK(kind_of([] { per_s_boundary(unit_circle(64), FractionalOrder(0.5), PerimeterCalibration{}); }) ==
          ErrorKind::CalibrationMissing);
    const ConvexCurve l = lopsided(512);
    CHECK(rel_err(per_s_boundary(scaled(l, 2.0), FractionalOrder(0.5)),
                  std::pow(2.0, 1.5) * per_s_boundary(l, FractionalOrder(0.5))) < 1e-4);
}

TEST_CASE("perimeter: Monte Carlo region estimate") {
    const ConvexCurve c = unit_circle(128);
    const auto a = per_s_region(c, FractionalOrder(0.5), 100000, 11);
    CHECK(a.std_error > 0.0);
    CHECK(std::abs(a.value - oracle::unit_disk_per_s(0.5)) < 3.0 * a.std_error);
    CHECK(a.std_error < 0.01 * a.value);

    setenv("FRACFLOW_THREADS", "3", 1);
    const auto b = per_s_region(c, FractionalOrder(0.5), 100000, 11);
    unsetenv("FRACFLOW_THREADS");
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);

    const auto big = per_s_region(build_curve(circle_points(2.0, 128)), FractionalOrder(0.5), 100000, 12);
    CHECK(std::abs(big.value - std::pow(2.0, 1.5) * oracle::unit_disk_per_s(0.5)) < 3.0 * big.std_error);

    CHECK(kind_of([&] { per_s_region(c, FractionalOrder(0.5), 100000, std::nullopt); }) == ErrorKind::SeedRequired);
    CHECK(kind_of([&] { per_s_region(c, FractionalOrder(0.5), 1000, 1); }) == ErrorKind::PreconditionViolated);
}

TEST_CASE("isoperimetric ratio") {
    const ConvexCurve l = lopsided(512);
    const double i0 = isoperimetric_ratio(l, FractionalOrder(0.5));
    for (double lam : {0.5, 3.0}) CHECK(rel_err(isoperimetric_ratio(scaled(l, lam), FractionalOrder(0.5)), i0) < 1e-4);
    const double disk = isoperimetric_ratio(unit_circle(512), FractionalOrder(0.5));
    CHECK(std::isfinite(disk));
    CHECK(disk > 0.0);
    CHECK(disk < isoperimetric_ratio(ellipse21(512), FractionalOrder(0.5)));
}

TEST_CASE("nonlocal |A|^2 analogue") {
    const ConvexCurve c = unit_circle(1024);
    const auto a2 = nonlocal_a2_all(c, FractionalOrder(0.5));
    CHECK(max_rel_spread(a2) < 1e-6);
    // On the unit circle the integral equals H_s / (2(1-s)).
    for (double s : {0.25, 0.5, 0.75})
        CHECK(rel_err(nonlocal_a2(c, FractionalOrder(s), 5), oracle::unit_circle_hs(s) / (2.0 * (1.0 - s))) < 1e-5);
    CHECK(nonlocal_a2(c, FractionalOrder(0.5), 5) == doctest::Approx(a2[5]).epsilon(1e-14));

    const ConvexCurve l = lopsided(512);
    // Dimension length^{-1-s}: dimensionless numerator, kernel length^{-2-s}, measure length.
    for (double lam : {0.5, 2.0})
        CHECK(rel_err(nonlocal_a2(scaled(l, lam), FractionalOrder(0.3), 9),
                      std::pow(lam, -1.3) * nonlocal_a2(l, FractionalOrder(0.3), 9)) < 1e-4);
    CHECK(rel_err(h_s_tangential_derivative(scaled(l, 2.0), FractionalOrder(0.3), 9),
                  std::pow(2.0, -1.3) * h_s_tangential_derivative(l, FractionalOrder(0.3), 9)) < 1e-4);
}

TEST_CASE("nonlocal Laplace operator") {
    const ConvexCurve l = lopsided(256);
    std::vector<double> f(256, 2.5), g(256), gc(256);
    for (std::size_t i = 0; i < 256; ++i) {
        g[i] = std::sin(0.1 * i) + l.point(i).x;
        gc[i] = g[i] + 7.0;
    }
    for (std::size_t i : {0, 100, 255}) {
        CHECK(std::abs(nonlocal_laplace(l, FractionalOrder(0.5), f, i)) <= 1e-12);
        const double a = nonlocal_laplace(l, FractionalOrder(0.5), g, i);
        CHECK(std::abs(nonlocal_laplace(l, FractionalOrder(0.5), gc, i) - a) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("s -> 1 limits on the unit circle converge to 2 = length of the unit interval") {
    const std::size_t n = 2048;
    const ConvexCurve c = unit_circle(n);
    const std::vector<double> ss{0.9, 0.99, 0.999};
    std::vector<double> eps, a2v, lap;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = c.point(i).x;  // cos(theta)
    for (double s : ss) {
        eps.push_back(1.0 - s);
        a2v.push_back(2.0 * s * (1.0 - s) * nonlocal_a2(c, FractionalOrder(s), 0));
        lap.push_back(2.0 * s * (1.0 - s) * nonlocal_laplace(c, FractionalOrder(s), f, 0));
    }
    // Exact value of 2s(1-s) a2 on the unit circle is s * H_s(unit circle).
    for (std::size_t k = 0; k < ss.size(); ++k) CHECK(rel_err(a2v[k], ss[k] * unit_circle_hs(ss[k])) < 1e-4);
    CHECK(rel_err(richardson_limit(eps, a2v), 2.0) < 0.02);
    CHECK(rel_err(richardson_limit(eps, lap), -2.0) < 0.03);
}

TEST_CASE("richardson extrapolation is exact for polynomials") {
    const std::vector<double> eps{0.1, 0.01, 0.001};
    std::vector<double> v;
    for (double e : eps) v.push_back(3.0 - 2.0 * e + 5.0 * e * e);
    CHECK(richardson_limit(eps, v) == doctest::Approx(3.0).epsilon(1e-12));
}
