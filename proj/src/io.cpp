#include "fracflow/io.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "fracflow/error.hpp"

namespace fracflow {

using nlohmann::json;

std::string format_double(double v) { return fmt::format("{}", v); }

std::string snapshot_to_json(const Snapshot& snap) {
    // Written by hand so doubles use the shortest round-trip form.
    std::string out = "{\"time\":" + format_double(snap.time) + ",\"points\":[";
    for (std::size_t i = 0; i < snap.points.size(); ++i) {
        if (i) out += ',';
        out += '[' + format_double(snap.points[i].x) + ',' + format_double(snap.points[i].y) + ']';
    }
    out += ']';
    if (snap.manifest) out += ",\"manifest\":\"" + *snap.manifest + '"';
    out += '}';
    return out;
}

Snapshot snapshot_from_json(const std::string& line) {
    Snapshot snap;
    try {
        const json j = json::parse(line);
        snap.time = j.value("time", 0.0);
        for (const auto& p : j.at("points")) {
            if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::Io, "point is not an [x, y] pair");
            snap.points.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        if (j.contains("manifest")) snap.manifest = j.at("manifest").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed snapshot: ") + e.what());
    }
    return snap;
}

void write_snapshot(std::ostream& os, const Snapshot& snap) { os << snapshot_to_json(snap) << '\n'; }

std::vector<Snapshot> read_snapshots(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::vector<Snapshot> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(snapshot_from_json(line));
    }
    return out;
}

}  // namespace fracflow
