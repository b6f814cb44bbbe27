#include "fracflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "fracflow/error.hpp"
#include "fracflow/parallel.hpp"

namespace fracflow {
namespace {

constexpr double kMinDt = 1e-12;

ConvexCurve rebuild(std::vector<Vec2> points, const char* what) {
    try {
        return build_curve(std::move(points));
    } catch (const Error& e) {
        throw Error(ErrorKind::CurveDegenerate, fmt::format("{}: {}", what, e.what()));
    }
}

void refresh(FlowState& st, const FlowConfig& config) {
    const FractionalOrder s(config.s);
    SweepResult sw = sweep(st.curve, s, config.policy, {.a2 = true, .per_s = true});
    st.h_s = std::move(sw.h_s);
    st.a2 = std::move(sw.a2);
    st.per_s = *sw.per_s;
    st.forcing = config.forcing_enabled ? forcing(st.curve, st.h_s, config.speed) : 0.0;
}

}  // namespace

std::string to_string(FlowEvent::Kind kind) {
    switch (kind) {
        case FlowEvent::Kind::Renormalize: return "renormalize";
        case FlowEvent::Kind::Resample: return "resample";
        case FlowEvent::Kind::ConvexityRepair: return "convexity_repair";
    }
    return "unknown";
}

void validate(const FlowConfig& c) {
    auto bad = [](const std::string& field, const std::string& why) {
        throw Error(ErrorKind::ConfigInvalid, fmt::format("{}: {}", field, why));
    };
    if (!(c.s > 0.0 && c.s < 1.0)) bad("s", fmt::format("{} is outside (0, 1)", c.s));
    if (c.n_points < kMinCurvePoints) bad("n_points", fmt::format("{} is below {}", c.n_points, kMinCurvePoints));
    if (!(c.cfl > 0.0 && c.cfl <= 1.0)) bad("cfl", fmt::format("{} is outside (0, 1]", c.cfl));
    if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) bad("t_end", fmt::format("{} must be positive", c.t_end));
    if (c.policy.singular_window < 1 || static_cast<std::size_t>(c.policy.singular_window) > c.n_points / 8)
        bad("window_m", fmt::format("{} is outside [1, n_points/8]", c.policy.singular_window));
    if (c.renormalize_volume && !c.forcing_enabled) bad("renormalize", "the unforced flow does not preserve volume");
    if (!(c.sphere_target >= 0.0)) bad("sphere_target", "must be >= 0");
    if (!(c.max_repair_fraction >= 0.0)) bad("max_repair_fraction", "must be >= 0");
    for (double dt : c.dt_schedule)
        if (!(dt > 0.0)) bad("dt_schedule", "step sizes must be positive");
}

double forcing(const ConvexCurve& curve, const std::vector<double>& h_s, const SpeedFunction& speed) {
    const auto& w = curve.weights();
    NeumaierSum num, den;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        num.add(w[i] * speed(h_s[i]));
        den.add(w[i]);
    }
    return num.value() / den.value();
}

double forcing(const ConvexCurve& curve, FractionalOrder s, const SpeedFunction& speed, const KernelPolicy& policy) {
    return forcing(curve, h_s_all(curve, s, policy), speed);
}

FlowState initial_state(const ConvexCurve& seed, const FlowConfig& config) {
    validate(config);
    FlowState st;
    st.curve = seed.size() == config.n_points ? seed : resample(seed, config.n_points);
    st.reference_area = enclosed_area(st.curve);
    refresh(st, config);
    return st;
}

double stable_dt(const FlowState& st, const FlowConfig& config) {
    double stiff = 1.0;
    for (double h : st.h_s) stiff = std::max(stiff, config.speed.derivative(h) * std::abs(h));
    return config.cfl * std::pow(st.curve.min_edge(), 1.0 + config.s) / stiff;
}

FlowState step(FlowState st, const FlowConfig& config) {
    double dt;
    if (!config.dt_schedule.empty()) {
        if (st.step_count >= config.dt_schedule.size())
            throw Error(ErrorKind::PreconditionViolated, "dt_schedule exhausted");
        dt = config.dt_schedule[st.step_count];
    } else {
        dt = stable_dt(st, config);
        const double left = config.t_end - st.time;
        if (left > 0.0) dt = std::min(dt, left);
    }
    if (!(dt >= kMinDt)) throw Error(ErrorKind::StepCollapse, fmt::format("dt = {} at t = {}", dt, st.time));

    const std::size_t n = st.curve.size();
    const auto& p = st.curve.points();
    const auto& nu = st.curve.normals();
    std::vector<Vec2> moved(n);
    for (std::size_t i = 0; i < n; ++i) moved[i] = p[i] + (dt * (st.forcing - config.speed(st.h_s[i]))) * nu[i];

    const std::size_t step_index = st.step_count + 1;
    const double t_new = st.time + dt;
    st.resampled = false;
    st.repaired = false;

    std::optional<ConvexCurve> next;
    if (is_discretely_convex(moved, config.tol_convex)) {
        try {
            next = build_curve(moved, config.tol_convex);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotConvex)
                throw Error(ErrorKind::CurveDegenerate, fmt::format("step {}: {}", step_index, e.what()));
        }
    }
    if (!next) {
        ConvexCurve hull = rebuild(convex_hull(moved), "convexity repair");
        try {
            if (hull.size() == n) {
                next = std::move(hull);
            } else {
                try {
                    next = resample(hull, n);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NotConvex) throw;
                    next = resample_polygonal(hull, n);
                }
            }
        } catch (const Error& e) {
            throw Error(ErrorKind::CurveDegenerate, fmt::format("convexity repair: {}", e.what()));
        }
        st.repaired = true;
        ++st.repairs;
        st.event_log.push_back({FlowEvent::Kind::ConvexityRepair, step_index, t_new});
    }

    const double area = enclosed_area(*next);
    st.volume_drift_prestep = (area - st.reference_area) / st.reference_area;
    if (config.renormalize_volume) {
        const double factor = std::sqrt(st.reference_area / area);
        next = rebuild(dilate(next->points(), barycenter(*next), factor), "renormalization");
        st.event_log.push_back({FlowEvent::Kind::Renormalize, step_index, t_new, st.volume_drift_prestep});
    }

    if (config.resample_every > 0 && step_index % config.resample_every == 0) {
        try {
            next = resample(*next, n);
            st.resampled = true;
            st.event_log.push_back({FlowEvent::Kind::Resample, step_index, t_new});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotConvex) throw;
        }
    }

    st.curve = std::move(*next);
    st.time = t_new;
    st.last_dt = dt;
    st.step_count = step_index;
    refresh(st, config);
    return st;
}

double extinction_time(double r0, double s) {
    return std::pow(r0, 1.0 + s) / ((1.0 + s) * unit_circle_hs(s));
}

double shrinking_circle(double r0, double s, double t) {
    const double base = std::pow(r0, 1.0 + s) - (1.0 + s) * unit_circle_hs(s) * t;
    if (!(base > 0.0))
        throw Error(ErrorKind::PastExtinction,
                    fmt::format("t = {} is past the extinction time {}", t, extinction_time(r0, s)));
    return std::pow(base, 1.0 / (1.0 + s));
}

ContainmentResult comparison_containment(const std::vector<TimedCurve>& inner, const std::vector<TimedCurve>& outer) {
    if (inner.size() != outer.size())
        throw Error(ErrorKind::GridMismatch,
                    fmt::format("inner has {} times, outer has {}", inner.size(), outer.size()));
    ContainmentResult out;
    for (std::size_t k = 0; k < inner.size(); ++k) {
        const double ti = inner[k].time, to = outer[k].time;
        if (std::abs(ti - to) > 1e-12 * std::max(1.0, std::abs(to)))
            throw Error(ErrorKind::GridMismatch, fmt::format("time {} differs: {} vs {}", k, ti, to));
        const ConvexCurve hull = build_curve(outer[k].points);
        const double tol = 1e-9 * hull.diameter();
        const bool inside = std::all_of(inner[k].points.begin(), inner[k].points.end(),
                                        [&](const Vec2& q) { return contains(hull, q, tol); });
        if (!inside) {
            if (k == 0) throw Error(ErrorKind::PreconditionViolated, "inner curve does not start inside outer");
            out.holds = false;
            out.first_violation = k;
            return out;
        }
    }
    return out;
}

}  // namespace fracflow
