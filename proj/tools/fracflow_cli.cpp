#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "acceptance.hpp"
#include "fracflow/config.hpp"
#include "fracflow/diagnostics.hpp"
#include "fracflow/error.hpp"
#include "fracflow/io.hpp"
#include "fracflow/nonlocal.hpp"
#include "fracflow/run.hpp"
#include "fracflow/shapes.hpp"

namespace fs = std::filesystem;
using namespace fracflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerify = 4;

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::ConfigInvalid:
        case ErrorKind::InvalidOrder: return kExitConfig;
        case ErrorKind::NumericalBreakdown:
        case ErrorKind::StepCollapse:
        case ErrorKind::CurveDegenerate: return kExitNumerical;
        default: return kExitOther;
    }
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + p.string());
    return os;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const RunConfig cfg = load_config(config_path);
    RunManifest manifest = make_manifest(cfg);
    manifest.start_time = utc_now();
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    auto diag = open_out(dir / "diagnostics.csv");
    diag << "# manifest " << manifest.hash << '\n';
    write_diagnostics_header(diag);
    auto snaps = open_out(dir / "trajectory.jsonl");

    RunOptions opt;
    opt.out_stride = cfg.out_stride;
    opt.check_stride = cfg.check_stride;
    opt.on_step = [&](const FlowState&, const DiagnosticsRecord& rec) { write_diagnostics_row(diag, rec); };

    int status = kExitOk;
    try {
        const ConvexCurve seed = make_seed(cfg.shape, cfg.flow.n_points);
        const Trajectory t = run(seed, cfg.flow, opt);
        for (Snapshot s : t.snapshots) {
            s.manifest = manifest.hash;
            write_snapshot(snaps, s);
        }
        auto checks = open_out(dir / "checks.csv");
        checks << "# manifest " << manifest.hash << '\n';
        write_check_header(checks);
        for (const auto& c : t.checks) write_check_row(checks, c);

        const DiagnosticsRecord& last = t.records.back();
        std::size_t renorm = 0, resamples = 0;
        for (const auto& e : t.events) {
            renorm += e.kind == FlowEvent::Kind::Renormalize;
            resamples += e.kind == FlowEvent::Kind::Resample;
        }
        manifest.summary = {{"steps", std::to_string(last.step)},
                            {"final_time", format_double(last.time)},
                            {"final_sphere_dev", format_double(last.sphere_dev)},
                            {"final_hs_spread", format_double(last.hs_spread)},
                            {"reached_target", t.reached_target ? "true" : "false"},
                            {"renormalizations", std::to_string(renorm)},
                            {"resamplings", std::to_string(resamples)},
                            {"convexity_repairs", std::to_string(last.repairs)}};
        std::cout << fmt::format("{} steps to t = {}, sphere_dev {:.3e}, hs_spread {:.3e}\n", last.step,
                                 format_double(last.time), last.sphere_dev, last.hs_spread);
    } catch (const Error& e) {
        status = exit_code(e);
        manifest.summary.emplace_back("error", e.what());
        std::cerr << e.what() << '\n';
    }
    manifest.end_time = utc_now();
    manifest.exit_status = status;
    open_out(dir / "manifest.json") << manifest_to_json(manifest);
    return status;
}

int cmd_curvature(const std::string& shape, double s, std::size_t n) {
    const ConvexCurve c = make_seed(parse_shape_spec(shape), n);
    const SweepResult r = sweep(c, FractionalOrder(s), {}, {.a2 = true});
    std::cout << "index,arclength,x,y,h_s,nonlocal_a2\n";
    double arc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::cout << i << ',' << format_double(arc) << ',' << format_double(c.point(i).x) << ','
                  << format_double(c.point(i).y) << ',' << format_double(r.h_s[i]) << ',' << format_double(r.a2[i])
                  << '\n';
        arc += c.edges()[i];
    }
    return kExitOk;
}

int cmd_verify(const std::string& level, bool no_correction) {
    acceptance::Options opt;
    opt.level = level == "full" ? acceptance::Level::Full : acceptance::Level::Fast;
    opt.correction_enabled = !no_correction;
    bool ok = true;
    acceptance::run_all(opt, [&](const acceptance::Result& r) {
        std::cout << acceptance::format_result(r) << std::endl;
        ok = ok && (r.pass || r.skipped);
    });
    return ok ? kExitOk : kExitVerify;
}

int cmd_limits(const std::vector<double>& svals, std::size_t n) {
    const ConvexCurve c = build_curve(circle_points(1.0, n));
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = c.point(i).x;
    std::vector<double> eps, lap, a2;
    std::cout << "s,laplace_cos_at_0,a2_at_0\n";
    for (double s : svals) {
        const FractionalOrder so(s);
        eps.push_back(1.0 - s);
        lap.push_back(2.0 * s * (1.0 - s) * nonlocal_laplace(c, so, f, 0));
        a2.push_back(2.0 * s * (1.0 - s) * nonlocal_a2(c, so, 0));
        std::cout << format_double(s) << ',' << format_double(lap.back()) << ',' << format_double(a2.back()) << '\n';
    }
    const double pi = std::numbers::pi;
    std::cout << fmt::format("limit,{},{}\n", format_double(richardson_limit(eps, lap)),
                             format_double(richardson_limit(eps, a2)));
    std::cout << fmt::format("target_pi,{},{}\n", format_double(-pi), format_double(pi));
    // One-dimensional boundary: the near-diagonal mass is 2 s (1-s) int |t|^{-s} -> 2.
    std::cout << "target_curve,-2,2\n";
    return kExitOk;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw Error(ErrorKind::ConfigInvalid, fmt::format("s: '{}' is not a number", item));
        }
    }
    if (out.empty()) throw Error(ErrorKind::ConfigInvalid, "s: empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volume-preserving fractional mean curvature flow of convex curves"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", level = "fast", s_list = "0.5", shape = "circle:1";
    std::string limits_s = "0.9,0.99,0.999";
    std::size_t n = 512, limits_n = 2048;
    bool no_correction = false;

    auto* run = app.add_subcommand("run", "integrate a flow from a config file");
    run->add_option("--config", config_path, "config file (key = value)")->required();
    run->add_option("--out", out_dir, "output directory");

    auto* curv = app.add_subcommand("curvature", "print H_s and the |A|^2 analogue per point");
    curv->add_option("--shape", shape, "circle:R | ellipse:A,B | rounded:K,A,B | file:PATH");
    curv->add_option("--s", s_list, "fractional order");
    curv->add_option("--n", n, "number of points");

    auto* verify = app.add_subcommand("verify", "run the acceptance battery");
    verify->add_option("--level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_flag("--no-correction", no_correction, "disable the singular-window correction (ablation)");

    auto* limits = app.add_subcommand("limits", "s -> 1 extrapolation on the unit circle");
    limits->add_option("--s", limits_s, "comma-separated orders");
    limits->add_option("--n", limits_n, "number of points");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, out_dir);
        if (*curv) return cmd_curvature(shape, parse_list(s_list).front(), n);
        if (*verify) return cmd_verify(level, no_correction);
        if (*limits) return cmd_limits(parse_list(limits_s), limits_n);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitOther;
    }
    return kExitOk;
}
