#include "fracflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/core.h>

#include "fracflow/error.hpp"
#include "fracflow/io.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow {
namespace {

// Smallest distance from x0 to an edge line, negative if x0 is outside.
double interior_margin(const ConvexCurve& curve, Vec2 x0) {
    const auto& p = curve.points();
    double margin = INFINITY;
    for (std::size_t e = 0; e < p.size(); ++e) {
        const Vec2 edge = p[curve.next(e)] - p[e];
        margin = std::min(margin, cross(edge, x0 - p[e]) / norm(edge));
    }
    return margin;
}

void require_inside(const ConvexCurve& curve, Vec2 x0) {
    if (!(interior_margin(curve, x0) > 0.0))
        throw Error(ErrorKind::CenterOutside, fmt::format("({}, {}) is not strictly inside the curve", x0.x, x0.y));
}

double weighted_sum(const ConvexCurve& curve, auto&& f) {
    const auto& w = curve.weights();
    NeumaierSum acc;
    for (std::size_t i = 0; i < curve.size(); ++i) acc.add(w[i] * f(i));
    return acc.value();
}

DerivativeCheck make_check(std::span<const FlowState> w, std::string quantity, double fd, double model) {
    const double diff = std::abs(fd - model);
    const double scale = std::max(std::abs(fd), std::abs(model));
    return {w[w.size() / 2].time, std::move(quantity), fd, model, scale > 0.0 ? diff / scale : 0.0, diff,
            w.back().time - w.front().time};
}

void require_window(std::span<const FlowState> w) {
    if (w.size() < 3) throw Error(ErrorKind::WindowTooShort, fmt::format("{} states, need 3", w.size()));
}

std::vector<double> normal_speed(const FlowState& st, const SpeedFunction& speed) {
    std::vector<double> v(st.h_s.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = st.forcing - speed(st.h_s[i]);
    return v;
}

}  // namespace

double support_scalar(const ConvexCurve& curve, Vec2 x0, std::size_t i) {
    require_inside(curve, x0);
    return dot(curve.point(i) - x0, curve.normals()[i]);
}

std::vector<double> tso_w_all(const ConvexCurve& curve, std::span<const double> speed_values, Vec2 x0, double alpha) {
    require_inside(curve, x0);
    const std::size_t n = curve.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double gap = dot(curve.point(i) - x0, curve.normals()[i]) - alpha;
        if (!(gap > 0.0))
            throw Error(ErrorKind::AlphaTooLarge, fmt::format("u - alpha = {} at point {}", gap, i));
        w[i] = speed_values[i] / gap;
    }
    return w;
}

double tso_w(const ConvexCurve& curve, FractionalOrder s, Vec2 x0, double alpha, std::size_t i,
             const KernelPolicy& policy) {
    const std::vector<double> h = h_s_all(curve, s, policy);
    return tso_w_all(curve, h, x0, alpha)[i];
}

WAnchor make_anchor(const ConvexCurve& curve, double s, double t0) {
    const Circle inner = chebyshev_circle(curve);
    const double r = inner.radius;
    const double length =
        (std::pow(r, 1.0 + s) - std::pow(0.5 * r, 1.0 + s)) / ((1.0 + s) * unit_circle_hs(s));
    return {inner.center, 0.25 * r, t0, length};
}

double sphere_deviation(const ConvexCurve& curve) {
    const Vec2 b = barycenter(curve);
    const auto& p = curve.points();
    std::vector<double> r(p.size());
    NeumaierSum acc;
    for (std::size_t i = 0; i < p.size(); ++i) {
        r[i] = norm(p[i] - b);
        acc.add(r[i]);
    }
    const double mean = acc.value() / static_cast<double>(p.size());
    double dev = 0.0;
    for (double ri : r) dev = std::max(dev, std::abs(ri - mean));
    return dev / mean;
}

DiagnosticsRecord record(const FlowState& st, const FlowConfig& config, RecordContext& ctx) {
    const ConvexCurve& c = st.curve;
    const double s = config.s;
    const std::size_t n = c.size();
    DiagnosticsRecord r;
    r.step = st.step_count;
    r.time = st.time;
    r.dt = st.last_dt;
    r.area = enclosed_area(c);
    r.per_s = st.per_s;
    r.iso_ratio = st.per_s * st.per_s / std::pow(r.area, 2.0 - s);

    const RadiiReport radii = radii_report(c);
    r.rho_in = radii.inner_radius;
    r.rho_out = radii.outer_radius;
    r.radius_ratio = r.rho_out / r.rho_in;
    r.diameter = radii.diameter;

    const auto [lo, hi] = std::minmax_element(st.h_s.begin(), st.h_s.end());
    r.hs_min = *lo;
    r.hs_max = *hi;
    const double mean = weighted_sum(c, [&](std::size_t i) { return st.h_s[i]; }) / c.perimeter();
    r.hs_spread = (r.hs_max - r.hs_min) / mean;
    r.hs_bound = hs_lower_bound(s, r.rho_out);

    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = config.speed(st.h_s[i]);
    r.phi_max = *std::max_element(phi.begin(), phi.end());
    r.forcing = st.forcing;

    if (!ctx.anchor || st.time >= ctx.anchor->t0 + ctx.anchor->length) ctx.anchor = make_anchor(c, s, st.time);
    const WAnchor& a = *ctx.anchor;
    const std::vector<double> w = tso_w_all(c, phi, a.x0, a.alpha);
    r.max_w = *std::max_element(w.begin(), w.end());
    r.alpha = a.alpha;
    r.u_min = INFINITY;
    r.u_max = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = dot(c.point(i) - a.x0, c.normals()[i]);
        r.u_min = std::min(r.u_min, u);
        r.u_max = std::max(r.u_max, u);
    }

    const double dscale = std::pow(r.diameter, 0.5 * (1.0 - s));
    for (std::size_t i = 0; i < n; ++i)
        r.cs_ratio_max = std::max(r.cs_ratio_max, st.h_s[i] / (dscale * std::sqrt((1.0 - s) * st.a2[i])));

    r.sphere_dev = sphere_deviation(c);
    const Vec2 b = barycenter(c);
    NeumaierSum rad;
    for (const Vec2& q : c.points()) rad.add(norm(q - b));
    r.mean_radius = rad.value() / static_cast<double>(n);
    r.vol_drift = st.volume_drift_prestep;
    r.repairs = st.repairs;
    return r;
}

DerivativeCheck check_eqper(std::span<const FlowState> w, const FlowConfig& config) {
    require_window(w);
    const FlowState& a = w.front();
    const FlowState& m = w[w.size() / 2];
    const FlowState& b = w.back();
    const double fd = (b.per_s - a.per_s) / (b.time - a.time);
    const double model =
        weighted_sum(m.curve, [&](std::size_t i) { return m.h_s[i] * (m.forcing - config.speed(m.h_s[i])); });
    return make_check(w, "per_s", fd, model);
}

double eqh_model(const FlowState& st, const FlowConfig& config, const SpeedFunction& speed, std::size_t i) {
    const double s = config.s;
    const std::vector<double> v = normal_speed(st, speed);
    const double lap = nonlocal_laplace(st.curve, FractionalOrder(s), v, i, config.policy);
    return 2.0 * s * (1.0 - s) * (-lap - v[i] * st.a2[i]);
}

DerivativeCheck check_eqh(std::span<const FlowState> w, const FlowConfig& config, std::size_t i) {
    require_window(w);
    for (std::size_t k = 1; k < w.size(); ++k)
        if (w[k].resampled || w[k].repaired)
            throw Error(ErrorKind::ResamplingInsideWindow,
                        fmt::format("point identity lost at step {}", w[k].step_count));
    const FlowState& a = w.front();
    const FlowState& m = w[w.size() / 2];
    const FlowState& b = w.back();
    const double fd = (b.h_s[i] - a.h_s[i]) / (b.time - a.time);
    return make_check(w, fmt::format("h_s[{}]", i), fd, eqh_model(m, config, config.speed, i));
}

DerivativeCheck check_volume_rate(std::span<const FlowState> w, const FlowConfig& config) {
    require_window(w);
    if (config.renormalize_volume)
        throw Error(ErrorKind::PreconditionViolated, "volume rate check needs renormalization off");
    const FlowState& a = w.front();
    const FlowState& m = w[w.size() / 2];
    const FlowState& b = w.back();
    const double fd = (enclosed_area(b.curve) - enclosed_area(a.curve)) / (b.time - a.time);
    const std::vector<double> v = normal_speed(m, config.speed);
    const double model = weighted_sum(m.curve, [&](std::size_t i) { return v[i]; });
    return make_check(w, "area", fd, model);
}

void write_diagnostics_header(std::ostream& os) {
    os << "time,area,per_s,iso_ratio,rho_in,rho_out,radius_ratio,hs_min,hs_max,hs_spread,phi_max,forcing,max_w,"
          "sphere_dev,vol_drift,repairs\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
    const double v[] = {r.time,   r.area,      r.per_s,   r.iso_ratio, r.rho_in, r.rho_out,    r.radius_ratio, r.hs_min,
                        r.hs_max, r.hs_spread, r.phi_max, r.forcing,   r.max_w,  r.sphere_dev, r.vol_drift};
    for (double x : v) os << format_double(x) << ',';
    os << r.repairs << '\n';
}

void write_check_header(std::ostream& os) { os << "time,quantity,fd_rate,model_rate,rel_discrepancy\n"; }

void write_check_row(std::ostream& os, const DerivativeCheck& c) {
    os << format_double(c.time) << ',' << c.quantity << ',' << format_double(c.fd_rate) << ','
       << format_double(c.model_rate) << ',' << format_double(c.rel_discrepancy) << '\n';
}

}  // namespace fracflow
