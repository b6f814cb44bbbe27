#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fracflow/config.hpp"
#include "fracflow/io.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace fracflow;
using fracflow::test::error_kind;
namespace fs = std::filesystem;

namespace {

std::string message_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& stdout_file = "/dev/null") {
    const std::string cmd = std::string(FRACFLOW_CLI) + " " + args + " > " + stdout_file.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("fracflow_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

constexpr const char* kSmallRun = R"(# small forced ellipse
shape.kind = ellipse
shape.a = 1.5
shape.b = 1
s = 0.5
speed.kind = power
speed.p = 2
n_points = 64
t_end = 0.002
out_stride = 5
check_stride = 4
)";

}  // namespace

TEST_CASE("config: defaults and keys") {
    const RunConfig d = parse_config("");
    CHECK(d == RunConfig{});
    CHECK(d.shape.kind == "ellipse");

    const RunConfig c = parse_config(kSmallRun);
    CHECK(c.shape.kind == "ellipse");
    CHECK(c.shape.a == 1.5);
    CHECK(c.flow.speed == SpeedFunction::power(2.0));
    CHECK(c.flow.n_points == 64);
    CHECK(c.flow.t_end == 0.002);
    CHECK(c.out_stride == 5);
    CHECK(c.check_stride == 4);
    CHECK(c.flow.renormalize_volume);

    const RunConfig e = parse_config("renormalize = off\nforcing = true\nseed = 42\ncorrection = false  # ablation\n");
    CHECK_FALSE(e.flow.renormalize_volume);
    CHECK(e.flow.rng_seed == 42u);
    CHECK_FALSE(e.flow.policy.correction_enabled);
}

TEST_CASE("config: echo round-trips") {
    for (const char* text : {"", kSmallRun, "shape.kind = rounded\nshape.sides = 5\nshape.a = 2\nshape.b = 1\nseed = 3\n",
                             "s = 0.25\nspeed.kind = exponential\ncfl = 0.1\nrenormalize = false\n"}) {
        const RunConfig c = parse_config(text);
        const std::string echo = echo_config(c);
        CHECK(parse_config(echo) == c);
        CHECK(echo_config(parse_config(echo)) == echo);
    }
}

TEST_CASE("config: errors name the key") {
    CHECK(message_of("s = 1.2").rfind("ConfigInvalid: s:", 0) == 0);
    CHECK(message_of("s = 0").rfind("ConfigInvalid: s:", 0) == 0);
    CHECK(message_of("colour = red").rfind("ConfigInvalid: colour:", 0) == 0);
    CHECK(message_of("cfl = fast").rfind("ConfigInvalid: cfl:", 0) == 0);
    CHECK(message_of("n_points = -4").rfind("ConfigInvalid: n_points:", 0) == 0);
    CHECK(message_of("speed.kind = power\nspeed.p = -1").rfind("ConfigInvalid: speed.p:", 0) == 0);
    CHECK(message_of("speed.kind = cubic").rfind("ConfigInvalid: speed.kind:", 0) == 0);
    CHECK(message_of("shape.kind = square").rfind("ConfigInvalid: shape.kind:", 0) == 0);
    CHECK(message_of("shape.kind = file").rfind("ConfigInvalid: shape.path:", 0) == 0);
    CHECK(message_of("renormalize = maybe").rfind("ConfigInvalid: renormalize:", 0) == 0);
    CHECK(message_of("just text").find("line 1") != std::string::npos);
    CHECK(error_kind([] { parse_config("s = 1.2"); }) == ErrorKind::ConfigInvalid);
    CHECK(error_kind([] { load_config("/nonexistent/run.cfg"); }) == ErrorKind::Io);
}

TEST_CASE("shipped configs parse") {
    std::size_t count = 0;
    for (const auto& e : fs::directory_iterator(FRACFLOW_CONFIG_DIR)) {
        const RunConfig c = load_config(e.path().string());
        CHECK(parse_config(echo_config(c)) == c);
        ++count;
    }
    CHECK(count >= 3);
}

TEST_CASE("sha256 test vectors") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("manifest hash") {
    const RunConfig a = parse_config(kSmallRun);
    const RunManifest m1 = make_manifest(a), m2 = make_manifest(a);
    CHECK(m1.hash == m2.hash);
    CHECK(m1.hash.size() == 64);
    CHECK(make_manifest(parse_config(std::string(kSmallRun) + "cfl = 0.1\n")).hash != m1.hash);
    // Defaults written out explicitly describe the same run.
    CHECK(make_manifest(parse_config(echo_config(a))).hash == m1.hash);

    const auto j = nlohmann::json::parse(manifest_to_json(m1));
    CHECK(j["hash"] == m1.hash);
    CHECK(j["calibration"]["unit_circle_hs"]["0.5"].get<double>() ==
          doctest::Approx(oracle::unit_circle_hs(0.5)).epsilon(1e-3));
}

TEST_CASE("cli: run writes deterministic outputs") {
    const fs::path dir = scratch_dir("run");
    {
        std::ofstream(dir / "small.cfg") << kSmallRun;
    }
    REQUIRE(run_cli("run --config " + (dir / "small.cfg").string() + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("run --config " + (dir / "small.cfg").string() + " --out " + (dir / "b").string()) == 0);
    for (const char* f : {"diagnostics.csv", "trajectory.jsonl", "checks.csv"}) {
        const std::string x = slurp(dir / "a" / f);
        CHECK_FALSE(x.empty());
        CHECK(x == slurp(dir / "b" / f));
    }

    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    const std::string hash = manifest["hash"];
    CHECK(manifest["exit_status"] == 0);
    CHECK(hash == nlohmann::json::parse(slurp(dir / "b" / "manifest.json"))["hash"]);
    CHECK(hash == make_manifest(parse_config(kSmallRun)).hash);

    const std::string diag = slurp(dir / "a" / "diagnostics.csv");
    CHECK(diag.rfind("# manifest " + hash + "\ntime,area,", 0) == 0);
    const auto snaps = read_snapshots((dir / "a" / "trajectory.jsonl").string());
    REQUIRE(snaps.size() >= 2);
    CHECK(snaps.front().time == 0.0);
    CHECK(snaps.back().time == doctest::Approx(0.002).epsilon(1e-14));
    CHECK(snaps.front().points.size() == 64);
    for (const auto& s : snaps) CHECK(s.manifest == hash);
}

TEST_CASE("cli: exit codes") {
    const fs::path dir = scratch_dir("exit");
    {
        std::ofstream(dir / "bad.cfg") << "s = 1.2\n";
    }
    CHECK(run_cli("run --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string()) == 2);
    CHECK(run_cli("run --config " + (dir / "missing.cfg").string() + " --out " + (dir / "o").string()) == 1);
    CHECK(run_cli("curvature --shape square:1") == 2);
    CHECK(run_cli("curvature --s 1.5") == 2);
    CHECK(run_cli("") != 0);
}

TEST_CASE("cli: curvature on the unit circle") {
    const fs::path dir = scratch_dir("curv");
    REQUIRE(run_cli("curvature --shape circle:1 --s 0.5 --n 256", dir / "out.csv") == 0);
    std::istringstream in(slurp(dir / "out.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,arclength,x,y,h_s,nonlocal_a2");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::vector<double> v;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
        REQUIRE(v.size() == 6);
        CHECK(v[0] == rows);
        CHECK(std::hypot(v[2], v[3]) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v[4] == doctest::Approx(oracle::unit_circle_hs(0.5)).epsilon(1e-3));
        CHECK(v[5] > 0.0);
        ++rows;
    }
    CHECK(rows == 256);
}
