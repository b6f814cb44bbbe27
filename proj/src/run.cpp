#include "fracflow/run.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <fmt/core.h>

#include "fracflow/error.hpp"

namespace fracflow {

Trajectory run(const ConvexCurve& seed, const FlowConfig& config, const RunOptions& options) {
    Trajectory out;
    FlowState st = initial_state(seed, config);
    RecordContext ctx;
    out.tracked_point = options.tracked_point.value_or(static_cast<std::size_t>(
        std::max_element(st.h_s.begin(), st.h_s.end()) - st.h_s.begin()));

    std::deque<FlowState> window;
    auto emit = [&](bool final) {
        const DiagnosticsRecord rec = record(st, config, ctx);
        out.records.push_back(rec);
        if (options.on_step) options.on_step(st, rec);
        if (final || st.step_count == 0 || (options.out_stride > 0 && st.step_count % options.out_stride == 0))
            out.snapshots.push_back({st.time, st.curve.points(), std::nullopt});
        return rec;
    };

    const bool scheduled = !config.dt_schedule.empty();
    auto more = [&] {
        if (st.step_count >= config.max_steps) return false;
        if (scheduled) return st.step_count < config.dt_schedule.size();
        return config.t_end - st.time > 1e-12 * std::max(1.0, config.t_end);
    };

    DiagnosticsRecord rec = emit(!more());
    if (config.sphere_target > 0.0 && rec.sphere_dev < config.sphere_target) out.reached_target = true;
    window.push_back(st);

    while (!out.reached_target && more()) {
        st = step(std::move(st), config);
        out.events.insert(out.events.end(), st.event_log.begin(), st.event_log.end());
        st.event_log.clear();

        const double allowed = std::max<double>(kMinRepairsToAbort, config.max_repair_fraction * st.step_count);
        if (static_cast<double>(st.repairs) > allowed)
            throw Error(ErrorKind::NumericalBreakdown,
                        fmt::format("{} convexity repairs in {} steps", st.repairs, st.step_count));

        rec = emit(false);
        if (config.sphere_target > 0.0 && rec.sphere_dev < config.sphere_target) out.reached_target = true;

        window.push_back(st);
        if (window.size() > 3) window.pop_front();
        const std::size_t k = st.step_count;
        if (options.check_stride > 0 && window.size() == 3 && (k + options.check_stride / 2) % options.check_stride == 0) {
            const std::vector<FlowState> w(window.begin(), window.end());
            out.checks.push_back(check_eqper(w, config));
            if (!w[1].resampled && !w[1].repaired && !w[2].resampled && !w[2].repaired)
                out.checks.push_back(check_eqh(w, config, out.tracked_point));
            if (!config.renormalize_volume) out.checks.push_back(check_volume_rate(w, config));
        }
    }
    if (out.snapshots.empty() || out.snapshots.back().time != st.time)
        out.snapshots.push_back({st.time, st.curve.points(), std::nullopt});
    out.final_state = std::move(st);
    return out;
}

}  // namespace fracflow
