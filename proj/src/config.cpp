#include "fracflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "fracflow/error.hpp"
#include "fracflow/io.hpp"

namespace fracflow {
namespace {

std::string_view trim(std::string_view v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = v.find_last_not_of(" \t\r");
    return v.substr(b, e - b + 1);
}

[[noreturn]] void invalid(std::string_view key, const std::string& why) {
    throw Error(ErrorKind::ConfigInvalid, fmt::format("{}: {}", key, why));
}

double as_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) invalid(key, fmt::format("'{}' is not a number", v));
    return out;
}

std::uint64_t as_unsigned(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        invalid(key, fmt::format("'{}' is not a non-negative integer", v));
    return out;
}

bool as_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    invalid(key, fmt::format("'{}' is not a boolean", v));
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorKind::ConfigInvalid, fmt::format("line {}: expected key = value", line_no));
        kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
    }

    RunConfig c;
    std::string speed_kind = c.flow.speed.name();
    double speed_p = c.flow.speed.exponent();
    for (const auto& [key, v] : kv) {
        if (key == "shape.kind") c.shape.kind = v;
        else if (key == "shape.a") c.shape.a = as_double(key, v);
        else if (key == "shape.b") c.shape.b = as_double(key, v);
        else if (key == "shape.sides") c.shape.sides = static_cast<int>(as_unsigned(key, v));
        else if (key == "shape.path") c.shape.path = v;
        else if (key == "s") c.flow.s = as_double(key, v);
        else if (key == "speed.kind") speed_kind = v;
        else if (key == "speed.p") speed_p = as_double(key, v);
        else if (key == "n_points") c.flow.n_points = as_unsigned(key, v);
        else if (key == "cfl") c.flow.cfl = as_double(key, v);
        else if (key == "t_end") c.flow.t_end = as_double(key, v);
        else if (key == "renormalize") c.flow.renormalize_volume = as_bool(key, v);
        else if (key == "resample_every") c.flow.resample_every = as_unsigned(key, v);
        else if (key == "window_m") c.flow.policy.singular_window = static_cast<int>(as_unsigned(key, v));
        else if (key == "correction") c.flow.policy.correction_enabled = as_bool(key, v);
        else if (key == "seed") c.flow.rng_seed = as_unsigned(key, v);
        else if (key == "out_stride") c.out_stride = as_unsigned(key, v);
        else if (key == "check_stride") c.check_stride = as_unsigned(key, v);
        else if (key == "sphere_target") c.flow.sphere_target = as_double(key, v);
        else if (key == "forcing") c.flow.forcing_enabled = as_bool(key, v);
        else if (key == "tol_convex") c.flow.tol_convex = as_double(key, v);
        else if (key == "max_repair_fraction") c.flow.max_repair_fraction = as_double(key, v);
        else if (key == "max_steps") c.flow.max_steps = as_unsigned(key, v);
        else invalid(key, "unknown key");
    }
    try {
        c.flow.speed = SpeedFunction::from_name(speed_kind, speed_p);
    } catch (const Error& e) {
        invalid(speed_kind == "power" ? "speed.p" : "speed.kind", e.what());
    }
    if (c.shape.kind != "circle" && c.shape.kind != "ellipse" && c.shape.kind != "rounded" && c.shape.kind != "file")
        invalid("shape.kind", fmt::format("unknown kind '{}'", c.shape.kind));
    if (!(c.shape.a > 0.0)) invalid("shape.a", "must be positive");
    if (c.shape.kind != "circle" && !(c.shape.b > 0.0)) invalid("shape.b", "must be positive");
    if (c.shape.kind == "rounded" && c.shape.sides < 3) invalid("shape.sides", "must be at least 3");
    if (c.shape.kind == "file" && c.shape.path.empty()) invalid("shape.path", "required for shape.kind = file");
    validate(c.flow);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string echo_config(const RunConfig& c) {
    const auto& f = c.flow;
    std::string out;
    auto put = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    put("shape.kind", c.shape.kind);
    put("shape.a", format_double(c.shape.a));
    put("shape.b", format_double(c.shape.b));
    put("shape.sides", std::to_string(c.shape.sides));
    if (!c.shape.path.empty()) put("shape.path", c.shape.path);
    put("s", format_double(f.s));
    put("speed.kind", f.speed.name());
    put("speed.p", format_double(f.speed.exponent()));
    put("n_points", std::to_string(f.n_points));
    put("cfl", format_double(f.cfl));
    put("t_end", format_double(f.t_end));
    put("renormalize", b(f.renormalize_volume));
    put("resample_every", std::to_string(f.resample_every));
    put("window_m", std::to_string(f.policy.singular_window));
    put("correction", b(f.policy.correction_enabled));
    if (f.rng_seed) put("seed", std::to_string(*f.rng_seed));
    put("out_stride", std::to_string(c.out_stride));
    put("check_stride", std::to_string(c.check_stride));
    put("sphere_target", format_double(f.sphere_target));
    put("forcing", b(f.forcing_enabled));
    put("tol_convex", format_double(f.tol_convex));
    put("max_repair_fraction", format_double(f.max_repair_fraction));
    put("max_steps", std::to_string(f.max_steps));
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::Io, "SHA-256 failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

RunManifest make_manifest(const RunConfig& config) {
    RunManifest m;
    m.config_echo = echo_config(config);
    m.per_s_prefactor = *committed_calibration().prefactor;
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) m.unit_circle_hs.emplace_back(s, unit_circle_hs(s));
    if (std::none_of(m.unit_circle_hs.begin(), m.unit_circle_hs.end(),
                     [&](const auto& e) { return e.first == config.flow.s; }))
        m.unit_circle_hs.emplace_back(config.flow.s, unit_circle_hs(config.flow.s));
    std::string content = m.version + '\n' + m.config_echo + "per_s_prefactor = " + format_double(m.per_s_prefactor) + '\n';
    for (const auto& [s, h] : m.unit_circle_hs) content += fmt::format("unit_circle_hs {} = {}\n", format_double(s), format_double(h));
    m.hash = sha256_hex(content);
    return m;
}

std::string manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["hash"] = m.hash;
    j["version"] = m.version;
    j["config"] = m.config_echo;
    j["calibration"]["per_s_prefactor"] = m.per_s_prefactor;
    for (const auto& [s, h] : m.unit_circle_hs) j["calibration"]["unit_circle_hs"][format_double(s)] = h;
    j["start_time"] = m.start_time;
    j["end_time"] = m.end_time;
    j["exit_status"] = m.exit_status;
    for (const auto& [k, v] : m.summary) j["summary"][k] = v;
    return j.dump(2) + '\n';
}

}  // namespace fracflow
