#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracflow/flow.hpp"
#include "fracflow/shapes.hpp"

namespace fracflow {

/// Everything `fracflow run` reads from its config file.
struct RunConfig {
    ShapeSpec shape;
    FlowConfig flow;
    std::size_t out_stride{50};
    std::size_t check_stride{25};

    bool operator==(const RunConfig&) const = default;
};

/// Flat `key = value` text, one pair per line, `#` starts a comment. Keys:
///   shape.kind shape.a shape.b shape.sides shape.path s speed.kind speed.p
///   n_points cfl t_end renormalize resample_every window_m correction seed
///   out_stride check_stride sphere_target forcing tol_convex
///   max_repair_fraction max_steps
/// Unlisted keys keep their defaults. Throws Error{ConfigInvalid} naming the
/// key for unknown keys, unparsable values and out-of-range values.
RunConfig parse_config(std::string_view text);
/// Throws Error{Io} if the file cannot be read.
RunConfig load_config(const std::string& path);

/// Every key with its value, in the format parse_config reads; parses back to
/// an identical RunConfig.
std::string echo_config(const RunConfig& config);

inline constexpr const char* kVersion = "fracflow 0.1.0";

struct RunManifest {
    std::string config_echo;
    std::string version{kVersion};
    double per_s_prefactor{0.0};
    std::vector<std::pair<double, double>> unit_circle_hs;  // (s, H_s)
    /// SHA-256 of the fields above; written into every output file.
    std::string hash;
    std::string start_time;
    std::string end_time;
    int exit_status{0};
    std::vector<std::pair<std::string, std::string>> summary;
};

RunManifest make_manifest(const RunConfig& config);
std::string manifest_to_json(const RunManifest& manifest);

std::string sha256_hex(std::string_view data);

}  // namespace fracflow
