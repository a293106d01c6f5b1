#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grokklab/dynamics_sim.hpp"
#include "grokklab/errors.hpp"
#include "grokklab/exp_runner.hpp"
#include "grokklab/grok_analysis.hpp"

using namespace grokk;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("grokklab_unit_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "grokklab");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return runner::cli_main(static_cast<int>(argv.size()), argv.data());
}

Trace tiny_trace() {
    ExperimentConfig c;
    c.d_in = 32;
    c.n_tr = 40;
    c.n_gen = 500;
    c.time_grid = runner::log_time_grid(1.0, 300.0, 15, 1.0);
    return run_iterative(c);
}

} // namespace

TEST_CASE("log time grid") {
    const auto g = runner::log_time_grid(1.0, 1000.0, 4);
    REQUIRE(g.size() == 5);
    CHECK(g[0] == 0.0);
    CHECK(g[2] == doctest::Approx(10.0));
    CHECK(g[4] == doctest::Approx(1000.0));
    const auto s = runner::log_time_grid(1.0, 10.0, 50, 1.0);
    CHECK(s.size() == 11);  // 0 plus 1..10, duplicates dropped
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
    CHECK_THROWS_AS(runner::log_time_grid(0.0, 10.0, 5), InvalidParameter);
}

TEST_CASE("trace CSV round trip and manifest") {
    TempDir dir;
    const Trace tr = tiny_trace();
    const std::string p = dir / "trace.csv";
    runner::export_trace(tr, p, 0.5, {{"note", runner::json_quote("x")}});
    const std::string text = slurp(p);
    CHECK(text.rfind("t,l_tr,l_gen,a_tr,a_gen\n", 0) == 0);
    const runner::TraceTable back = runner::read_trace_csv(p);
    REQUIRE(back.t.size() == tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(back.t[i] == doctest::Approx(tr.times[i]).epsilon(1e-11));
        CHECK(back.l_tr[i] == doctest::Approx(tr.l_tr[i]).epsilon(1e-11));
        CHECK(back.l_gen[i] == doctest::Approx(tr.l_gen[i]).epsilon(1e-11));
        CHECK(back.a_gen[i] == doctest::Approx(tr.a_gen[i]).epsilon(1e-11));
    }
    CHECK(runner::manifest_path(p) == dir / "trace.manifest.json");
    const auto m = nlohmann::json::parse(slurp(runner::manifest_path(p)));
    CHECK(m["config"]["d_in"] == 32);
    CHECK(m["seeds"]["base"] == 1);
    CHECK(m["engine"] == "iterative");
    CHECK(m["note"] == "x");
    CHECK(m.contains("time_convention"));
    CHECK(m["tool_version"] == runner::kToolVersion);

    Trace empty = tr;
    empty.times.clear();
    empty.l_tr.clear();
    empty.l_gen.clear();
    empty.l_gen_population.clear();
    empty.a_tr.clear();
    empty.a_gen.clear();
    runner::export_trace(empty, dir / "empty.csv");
    CHECK(slurp(dir / "empty.csv") == "t,l_tr,l_gen,a_tr,a_gen\n");
    CHECK_THROWS_AS(runner::read_trace_csv(dir / "missing.csv"), IoError);
    runner::write_text(dir / "bad.csv", "t,x\n1,2\n");
    CHECK_THROWS_AS(runner::read_trace_csv(dir / "bad.csv"), IoError);
}

TEST_CASE("phase grid CSV") {
    TempDir dir;
    ExperimentConfig base;
    const PhaseGrid g = phase_sweep(base, {"gamma", {0.0}}, {"lambda", {0.5, 1.5}});
    runner::export_phase_grid(g, dir / "phase.csv", {});
    std::istringstream in(slurp(dir / "phase.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "axis1,axis2,delta_t,status");
    std::getline(in, line);
    CHECK(line.rfind("0,0.5,", 0) == 0);
    CHECK(line.substr(line.rfind(',') + 1) == "grok");
    std::getline(in, line);
    CHECK(line == "0,1.5,nan,gen-never-converges");
    const auto m = nlohmann::json::parse(slurp(dir / "phase.manifest.json"));
    CHECK(m["axis1"] == "gamma");
    CHECK(m["rows"] == 2);
}

TEST_CASE("number formatting") {
    CHECK(runner::format_number(0.1) == "0.1");
    CHECK(runner::format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(runner::format_number(1e-30) == "1e-30");
}

TEST_CASE("cli: exit codes") {
    CHECK(cli({}) == 2);
    CHECK(cli({"frobnicate"}) == 2);
    CHECK(cli({"predict", "--eta0", "-1"}) == 2);
    CHECK(cli({"grok-time", "--method", "bogus"}) == 2);
    CHECK(cli({"grok-time", "--method", "closed-leading", "--lambda", "1.5"}) == 1);
}

TEST_CASE("cli: predict, grok-time, simulate, phase-diagram") {
    TempDir dir;
    REQUIRE(cli({"predict", "--lambda", "1.5", "--time", "1e6", "--out", dir / "p.csv"}) == 0);
    const runner::TraceTable p = runner::read_trace_csv(dir / "p.csv");
    REQUIRE(p.l_gen.size() == 1);
    CHECK(p.l_gen[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    REQUIRE(cli({"grok-time", "--lambda", "0.9", "--eta0", "0.01", "--epsilon", "1e-3", "--method", "closed-corrected",
                 "--out", dir / "g.json"}) == 0);
    const auto g = nlohmann::json::parse(slurp(dir / "g.json"));
    CHECK(g["t_star_tr"].get<double>() > 0.0);
    CHECK(g["t_star_gen"].get<double>() > g["t_star_tr"].get<double>());
    CHECK(g["delta_t"].is_null());
    CHECK(g.contains("warning"));
    CHECK(g["delta_t_lambert"].get<double>() > 0.0);

    REQUIRE(cli({"grok-time", "--lambda", "0.25", "--method", "closed-leading", "--out", dir / "l.json"}) == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "l.json"))["delta_t"].get<double>() == doctest::Approx(138.629436112));

    const std::vector<std::string> sim{"simulate", "--d-in", "32", "--lambda", "0.5", "--time-min", "1", "--time-max",
                                       "200", "--time-points", "10", "--seed", "3"};
    auto a = sim;
    a.insert(a.end(), {"--out", dir / "a.csv"});
    auto b = sim;
    b.insert(b.end(), {"--out", dir / "b.csv"});
    REQUIRE(cli(a) == 0);
    REQUIRE(cli(b) == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(fs::exists(dir / "a.manifest.json"));

    runner::write_text(dir / "cfg.ini", "d-in = 32\nlambda = 0.5\nseed = 3\ntime-min = 1\ntime-max = 200\ntime-points = 10\n");
    REQUIRE(cli({"simulate", "--config", dir / "cfg.ini", "--out", dir / "c.csv"}) == 0);
    CHECK(slurp(dir / "c.csv") == slurp(dir / "a.csv"));
    REQUIRE(cli({"simulate", "--config", dir / "cfg.ini", "--seed", "4", "--out", dir / "d.csv"}) == 0);
    CHECK(slurp(dir / "d.csv") != slurp(dir / "a.csv"));

    REQUIRE(cli({"phase-diagram", "--axis1", "gamma", "--grid1", "0,0.01", "--axis2", "lambda", "--grid2", "0.5,1.5",
                 "--out", dir / "ph.csv"}) == 0);
    CHECK(runner::read_trace_csv(dir / "a.csv").t.size() == 11);
    CHECK(fs::exists(dir / "ph.manifest.json"));
    CHECK(cli({"phase-diagram", "--axis1", "eta", "--out", dir / "x.csv"}) == 2);
}
