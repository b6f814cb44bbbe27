#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracflow/vec2.hpp"

namespace fracflow {

/// One line of a JSONL trajectory: {"time": t, "points": [[x,y],...], "manifest": "<hash>"}.
struct Snapshot {
    double time{0.0};
    std::vector<Vec2> points;
    std::optional<std::string> manifest;
};

std::string snapshot_to_json(const Snapshot& snap);
Snapshot snapshot_from_json(const std::string& line);

void write_snapshot(std::ostream& os, const Snapshot& snap);
/// Reads every non-empty line. Throws Error{Io} on unreadable files or malformed lines.
std::vector<Snapshot> read_snapshots(const std::string& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace fracflow
