#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fracflow/diagnostics.hpp"
#include "fracflow/shapes.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace fracflow;
using fracflow::test::error_kind;
using fracflow::test::rel_err;

namespace {

ConvexCurve circle(double r, std::size_t n) { return build_curve(circle_points(r, n)); }

FlowConfig config(std::size_t n, SpeedFunction speed = SpeedFunction::identity()) {
    FlowConfig c;
    c.s = 0.5;
    c.n_points = n;
    c.speed = speed;
    return c;
}

std::vector<FlowState> three_states(const ConvexCurve& seed, const FlowConfig& cfg) {
    std::vector<FlowState> w{initial_state(seed, cfg)};
    w.push_back(step(w.back(), cfg));
    w.push_back(step(w.back(), cfg));
    return w;
}

// Mean of |x| over equal arc-length samples of the ellipse (a cos t, b sin t),
// as a ratio of two periodic trapezoid sums in t.
double ellipse_mean_radius(double a, double b) {
    const int m = 20000;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < m; ++k) {
        const double t = 2.0 * std::numbers::pi * k / m;
        const double speed = std::hypot(a * std::sin(t), b * std::cos(t));
        num += std::hypot(a * std::cos(t), b * std::sin(t)) * speed;
        den += speed;
    }
    return num / den;
}

}  // namespace

TEST_CASE("support scalar") {
    const ConvexCurve c = circle(2.0, 128);
    for (std::size_t i : {0u, 17u, 90u}) CHECK(support_scalar(c, {}, i) == doctest::Approx(2.0).epsilon(1e-14));
    // Shifting the centre by d changes u by -<d, nu>.
    const Vec2 d{0.3, -0.2};
    CHECK(support_scalar(c, d, 0) == doctest::Approx(2.0 - dot(d, c.normals()[0])).epsilon(1e-14));
    CHECK(error_kind([&] { support_scalar(c, {2.0, 0.0}, 0); }) == ErrorKind::CenterOutside);
    CHECK(error_kind([&] { support_scalar(c, {5.0, 5.0}, 3); }) == ErrorKind::CenterOutside);
}

TEST_CASE("W on the unit circle") {
    const ConvexCurve c = circle(1.0, 512);
    const double cs = oracle::unit_circle_hs(0.5);
    CHECK(rel_err(tso_w(c, FractionalOrder(0.5), {}, 0.25, 7), cs / 0.75) < 1e-5);
    CHECK(error_kind([&] { tso_w(c, FractionalOrder(0.5), {}, 1.0, 0); }) == ErrorKind::AlphaTooLarge);
    CHECK(error_kind([&] { tso_w(c, FractionalOrder(0.5), {}, 1.5, 0); }) == ErrorKind::AlphaTooLarge);
}

TEST_CASE("W is increasing in alpha") {
    const ConvexCurve c = test::egg(256);
    const auto h = h_s_all(c, FractionalOrder(0.5));
    const Circle in = chebyshev_circle(c);
    double prev = 0.0;
    for (double frac : {0.0, 0.1, 0.25, 0.5, 0.9}) {
        const auto w = tso_w_all(c, h, in.center, frac * in.radius);
        const double m = *std::max_element(w.begin(), w.end());
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("anchor: inner centre, quarter radius, half-radius window") {
    const ConvexCurve c = circle(1.0, 256);
    const WAnchor a = make_anchor(c, 0.5, 0.7);
    // The inscribed circle of the polygon has the apothem as radius.
    const double r = std::cos(std::numbers::pi / 256);
    CHECK(norm(a.x0) < 1e-9);
    CHECK(a.alpha == doctest::Approx(0.25 * r).epsilon(1e-9));
    CHECK(a.t0 == 0.7);
    CHECK(shrinking_circle(r, 0.5, a.length) == doctest::Approx(0.5 * r).epsilon(1e-12));
}

TEST_CASE("sphere deviation") {
    CHECK(sphere_deviation(circle(1.0, 256)) < 1e-13);
    CHECK(sphere_deviation(circle(1e-3, 256)) < 1e-12);

    const ConvexCurve e = build_curve(ellipse_points(2.0, 1.0, 512));
    const double mean = ellipse_mean_radius(2.0, 1.0);
    const double expected = std::max(2.0 - mean, mean - 1.0) / mean;
    CHECK(sphere_deviation(e) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(sphere_deviation(e) == doctest::Approx(0.36641).epsilon(1e-4));

    CHECK(sphere_deviation(scaled(e, 3.5)) == doctest::Approx(sphere_deviation(e)).epsilon(1e-13));
    CHECK(sphere_deviation(rotated(translated(e, {4.0, 1.0}), 1.1)) ==
          doctest::Approx(sphere_deviation(e)).epsilon(1e-12));
}

TEST_CASE("record: circle") {
    const FlowConfig cfg = config(256);
    const FlowState st = initial_state(circle(1.0, 256), cfg);
    RecordContext ctx;
    const DiagnosticsRecord r = record(st, cfg, ctx);
    CHECK(r.step == 0);
    CHECK(r.time == 0.0);
    CHECK(r.area == doctest::Approx(256 * 0.5 * std::sin(2 * std::numbers::pi / 256)).epsilon(1e-14));
    CHECK(r.radius_ratio == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.hs_spread < 1e-10);
    CHECK(r.phi_max == doctest::Approx(r.hs_max).epsilon(1e-15));
    CHECK(r.forcing == doctest::Approx(r.hs_max).epsilon(1e-10));
    CHECK(r.max_w == doctest::Approx(r.hs_max / (1.0 - r.alpha)).epsilon(1e-9));
    CHECK(r.sphere_dev < 1e-13);
    CHECK(r.repairs == 0);
    CHECK(r.iso_ratio == doctest::Approx(r.per_s * r.per_s / std::pow(r.area, 1.5)).epsilon(1e-14));
    REQUIRE(ctx.anchor.has_value());
    CHECK(ctx.anchor->t0 == 0.0);
}

TEST_CASE("record: anchor is kept inside its window") {
    const FlowConfig cfg = config(128);
    FlowState st = initial_state(test::egg(128), cfg);
    RecordContext ctx;
    record(st, cfg, ctx);
    const WAnchor first = *ctx.anchor;
    st = step(std::move(st), cfg);
    record(st, cfg, ctx);
    CHECK(ctx.anchor->t0 == first.t0);
    st.time = first.t0 + first.length;
    record(st, cfg, ctx);
    CHECK(ctx.anchor->t0 == st.time);
}

TEST_CASE("record: bounds on random convex curves") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(1.0, 3.0), ut(0.0, 6.0);
    for (int trial = 0; trial < 6; ++trial) {
        const ConvexCurve c = trial % 2 ? rotated(build_curve(ellipse_points(ua(rng), 1.0, 256)), ut(rng))
                                        : rotated(test::egg(256), ut(rng));
        for (double s : {0.25, 0.75}) {
            FlowConfig cfg = config(256);
            cfg.s = s;
            const FlowState st = initial_state(c, cfg);
            RecordContext ctx;
            const DiagnosticsRecord r = record(st, cfg, ctx);
            CHECK(r.hs_min >= r.hs_bound);
            CHECK(r.hs_min <= r.forcing);
            CHECK(r.forcing <= r.hs_max);
            CHECK(r.rho_in <= r.rho_out);
            CHECK(r.u_min - r.alpha >= r.alpha);
            CHECK(r.u_max - r.alpha <= 2.0 * r.rho_out - r.alpha);
            CHECK(r.max_w <= r.phi_max / r.alpha);
            CHECK(r.max_w >= r.hs_min / (r.u_max - r.alpha));
            CHECK(std::isfinite(r.cs_ratio_max));
            CHECK(r.cs_ratio_max > 0.0);
        }
    }
}

TEST_CASE("csv columns") {
    std::ostringstream os;
    write_diagnostics_header(os);
    CHECK(os.str() ==
          "time,area,per_s,iso_ratio,rho_in,rho_out,radius_ratio,hs_min,hs_max,hs_spread,phi_max,forcing,max_w,"
          "sphere_dev,vol_drift,repairs\n");
    DiagnosticsRecord r;
    r.time = 0.5;
    r.repairs = 2;
    std::ostringstream row;
    write_diagnostics_row(row, r);
    CHECK(row.str() == "0.5,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2\n");

    std::ostringstream ch;
    write_check_header(ch);
    CHECK(ch.str().rfind("time,quantity,fd_rate,model_rate,rel_discrepancy", 0) == 0);
}

TEST_CASE("derivative identity for Per_s") {
    for (const auto& phi : {SpeedFunction::identity(), SpeedFunction::power(2.0)}) {
        const FlowConfig cfg = config(256, phi);
        const auto w = three_states(test::egg(256), cfg);
        const DerivativeCheck c = check_eqper(w, cfg);
        CHECK(c.quantity == "per_s");
        CHECK(c.time == w[1].time);
        CHECK(c.span == doctest::Approx(w[2].time - w[0].time).epsilon(1e-15));
        CHECK(c.model_rate <= 0.0);
        CHECK(c.rel_discrepancy < 0.05);
    }
    const FlowConfig cfg = config(64);
    const std::vector<FlowState> two{initial_state(circle(1.0, 64), cfg)};
    CHECK(error_kind([&] { check_eqper(two, cfg); }) == ErrorKind::WindowTooShort);
}

TEST_CASE("eqh model: constant normal speed") {
    // V = 1 everywhere: the Laplace term vanishes and the rate is -2s(1-s) a2.
    const FlowConfig cfg = config(256);
    FlowState st = initial_state(circle(1.0, 256), cfg);
    st.forcing += 1.0;
    for (std::size_t i : {0u, 100u}) CHECK(eqh_model(st, cfg, cfg.speed, i) == doctest::Approx(-0.5 * st.a2[i]).epsilon(1e-10));
    // Unperturbed circle: V = 0, so H_s is stationary.
    st.forcing -= 1.0;
    CHECK(std::abs(eqh_model(st, cfg, cfg.speed, 0)) < 1e-9 * st.a2[0]);
}

TEST_CASE("derivative identity for H_s") {
    FlowConfig cfg = config(512);
    const auto w = three_states(test::egg(512), cfg);
    for (std::size_t i : {0u, 128u, 400u}) {
        const DerivativeCheck c = check_eqh(w, cfg, i);
        CHECK(c.rel_discrepancy < 0.10);
    }
    auto bad = w;
    bad[2].resampled = true;
    CHECK(error_kind([&] { check_eqh(bad, cfg, 0); }) == ErrorKind::ResamplingInsideWindow);
    bad = w;
    bad[1].repaired = true;
    CHECK(error_kind([&] { check_eqh(bad, cfg, 0); }) == ErrorKind::ResamplingInsideWindow);
}

TEST_CASE("volume rate") {
    FlowConfig cfg = config(256);
    cfg.renormalize_volume = false;
    const auto w = three_states(test::egg(256), cfg);
    const DerivativeCheck c = check_volume_rate(w, cfg);
    const double a0 = enclosed_area(w[0].curve);
    CHECK(std::abs(c.model_rate) < 1e-10 * a0);
    CHECK(std::abs(c.fd_rate) < 1e-2 * a0);
    cfg.renormalize_volume = true;
    CHECK(error_kind([&] { check_volume_rate(w, cfg); }) == ErrorKind::PreconditionViolated);
}
