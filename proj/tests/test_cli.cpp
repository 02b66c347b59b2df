#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "sicams/panel.hpp"
#include "sicams/synthgen.hpp"

using namespace sicams;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* p = std::getenv("SICAMS_CLI");
    REQUIRE_MESSAGE(p != nullptr, "SICAMS_CLI must point at the CLI binary");
    return p;
}

struct Workspace {
    fs::path dir;
    Workspace() {
        dir = fs::temp_directory_path() /
              ("sicams_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

struct RunResult {
    int code = -1;
    std::string err;
};

RunResult run(const Workspace& ws, const std::string& args) {
    static int n = 0;
    std::string err_path = ws.file("stderr_" + std::to_string(n++) + ".txt");
    std::string cmd = cli() + " " + args + " >/dev/null 2>" + err_path;
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = status >= 0 ? (status / 256) : -1;
    std::ifstream in(err_path);
    r.err = {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const std::string& path) { return json::parse(read_file(path)); }

synth::Scenario base_scenario() {
    synth::Scenario sc;
    sc.rows = 6;
    sc.cols = 6;
    sc.daily_pattern = synth::default_daily_pattern();
    sc.noise = 0.03;
    for (int r = 0; r < 6; r += 2)
        for (int c = 0; c < 6; c += 2)
            sc.sensor_nodes.push_back("n" + std::to_string(r) + "_" + std::to_string(c));
    return sc;
}

}  // namespace

TEST_CASE("simulate is deterministic per seed and panels re-ingest cleanly") {
    Workspace ws;
    synth::scenario_to_json_file(base_scenario(), ws.file("scenario.json"));

    auto a = run(ws, "simulate --scenario " + ws.file("scenario.json") +
                         " --seed 5 --horizon 240 --out-prefix " + ws.file("a") +
                         " --report " + ws.file("a.json"));
    auto b = run(ws, "simulate --scenario " + ws.file("scenario.json") +
                         " --seed 5 --horizon 240 --out-prefix " + ws.file("b"));
    auto c = run(ws, "simulate --scenario " + ws.file("scenario.json") +
                         " --seed 6 --horizon 240 --out-prefix " + ws.file("c"));
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    REQUIRE(c.code == 0);
    CHECK(read_file(ws.file("a_panel.csv")) == read_file(ws.file("b_panel.csv")));
    CHECK(read_file(ws.file("a_panel.csv")) != read_file(ws.file("c_panel.csv")));
    CHECK(read_json(ws.file("a.json"))["sensors"] == 9);

    // Training on the emitted panel succeeds, so the CSV round-trips.
    auto t = run(ws, "train --panel " + ws.file("a_panel.csv") + " --roles " +
                         ws.file("a_roles.csv") + " --scheme two-hour-block --out " +
                         ws.file("model.json") + " --report " + ws.file("train.json"));
    REQUIRE_MESSAGE(t.code == 0, t.err);
    CHECK(read_json(ws.file("train.json"))["clusters"] == 12);
}

TEST_CASE("clean panel keeps the alarm rate low") {
    Workspace ws;
    synth::scenario_to_json_file(base_scenario(), ws.file("scenario.json"));
    REQUIRE(run(ws, "simulate --scenario " + ws.file("scenario.json") +
                        " --seed 11 --horizon 1440 --out-prefix " + ws.file("tr"))
                .code == 0);
    REQUIRE(run(ws, "simulate --scenario " + ws.file("scenario.json") +
                        " --seed 12 --horizon 720 --out-prefix " + ws.file("te"))
                .code == 0);
    REQUIRE(run(ws, "train --panel " + ws.file("tr_panel.csv") + " --roles " +
                        ws.file("tr_roles.csv") + " --scheme hour-of-day --out " +
                        ws.file("model.json"))
                .code == 0);
    auto d = run(ws, "detect --panel " + ws.file("te_panel.csv") + " --roles " +
                         ws.file("te_roles.csv") + " --model " + ws.file("model.json") +
                         " --alpha 0.05 --window 12 --out " + ws.file("stats.csv") +
                         " --report " + ws.file("detect.json"));
    REQUIRE_MESSAGE(d.code == 0, d.err);
    auto rep = read_json(ws.file("detect.json"));
    CHECK(rep["alarm_fraction"].get<double>() < 0.15);
}

TEST_CASE("leak pipeline: simulate, train, detect, localize, evaluate") {
    Workspace ws;
    auto sc = base_scenario();
    synth::scenario_to_json_file(sc, ws.file("train_scenario.json"));

    synth::ScenarioEvent ev;
    ev.record.id = "n2_2";
    ev.record.kind = EventKind::Abrupt;
    ev.record.magnitude = 80.0;
    ev.record.start = 600 * 3600;
    sc.events.push_back(ev);
    synth::scenario_to_json_file(sc, ws.file("leak_scenario.json"));

    REQUIRE(run(ws, "simulate --scenario " + ws.file("train_scenario.json") +
                        " --seed 21 --horizon 1440 --out-prefix " + ws.file("tr"))
                .code == 0);
    REQUIRE(run(ws, "simulate --scenario " + ws.file("leak_scenario.json") +
                        " --seed 22 --horizon 1000 --out-prefix " + ws.file("lk"))
                .code == 0);
    REQUIRE(run(ws, "train --panel " + ws.file("tr_panel.csv") + " --roles " +
                        ws.file("tr_roles.csv") + " --scheme hour-of-day --out " +
                        ws.file("model.json"))
                .code == 0);

    auto d = run(ws, "detect --panel " + ws.file("lk_panel.csv") + " --roles " +
                         ws.file("lk_roles.csv") + " --model " + ws.file("model.json") +
                         " --alpha 0.01 --window 12 --out " + ws.file("stats.csv") +
                         " --report " + ws.file("detect.json"));
    REQUIRE_MESSAGE(d.code == 0, d.err);
    CHECK(read_json(ws.file("detect.json"))["alarm_fraction"].get<double>() > 0.2);

    // Change points on the moving average pick up the onset.
    auto cp = run(ws, "changepoints --stats " + ws.file("stats.csv") +
                          " --column ma --out " + ws.file("scps.csv") + " --events-out " +
                          ws.file("cp_events.csv") + " --report " + ws.file("cp.json"));
    REQUIRE_MESSAGE(cp.code == 0, cp.err);
    CHECK(read_json(ws.file("cp.json"))["scps"].get<int>() >= 1);

    std::string when = format_iso8601(800 * 3600);
    auto lz = run(ws, "localize --panel " + ws.file("lk_panel.csv") + " --roles " +
                          ws.file("lk_roles.csv") + " --model " + ws.file("model.json") +
                          " --nodes " + ws.file("lk_nodes.csv") + " --edges " +
                          ws.file("lk_edges.csv") + " --bindings " + ws.file("lk_roles.csv") +
                          " --time " + when + " --truth-x 200 --truth-y 200 --out " +
                          ws.file("field.csv") + " --report " + ws.file("loc.json"));
    REQUIRE_MESSAGE(lz.code == 0, lz.err);
    auto loc = read_json(ws.file("loc.json"));
    CHECK(loc["success"].get<bool>());
    CHECK(loc["distance_m"].get<double>() <= 300.0);

    // Feed the localization back through evaluate.
    {
        std::ofstream dets(ws.file("dets.csv"));
        dets << "time,node\n" << when << "," << loc["top_node"].get<std::string>() << "\n";
    }
    auto evr = run(ws, "evaluate --detections " + ws.file("dets.csv") + " --truth " +
                           ws.file("lk_events.csv") + " --nodes " + ws.file("lk_nodes.csv") +
                           " --edges " + ws.file("lk_edges.csv") + " --radius 300 --report " +
                           ws.file("eval.json"));
    REQUIRE_MESSAGE(evr.code == 0, evr.err);
    auto er = read_json(ws.file("eval.json"));
    CHECK(er["tp"] == 1);
    CHECK(er["fp"] == 0);
    CHECK(er["fn"] == 0);

    auto disc = run(ws, "discriminate --panel " + ws.file("lk_panel.csv") + " --roles " +
                            ws.file("lk_roles.csv") + " --model " + ws.file("model.json") +
                            " --nodes " + ws.file("lk_nodes.csv") + " --edges " +
                            ws.file("lk_edges.csv") + " --bindings " + ws.file("lk_roles.csv") +
                            " --time " + when + " --report " + ws.file("disc.json"));
    REQUIRE_MESSAGE(disc.code == 0, disc.err);
    CHECK(read_json(ws.file("disc.json"))["verdict"] == "leak");
}

TEST_CASE("loss model fit and predict round trip through files") {
    Workspace ws;
    // Hand-made statistics CSV plus perfectly linear actual volumes.
    {
        std::ofstream stats(ws.file("stats.csv"));
        stats << "timestamp,cluster,t2,t2f,ma,wh,status\n";
        std::ofstream actual(ws.file("actual.csv"));
        actual << "timestamp,volume\n";
        for (int t = 0; t < 24; ++t) {
            double f = 1.0 + 0.25 * t;
            stats << format_iso8601(t * 3600) << ",0," << f << "," << f << "," << f << ",0,0\n";
            actual << format_iso8601(t * 3600) << "," << (15.0 * f - 4.0) << "\n";
        }
    }
    auto fit = run(ws, "estimate-loss --stats " + ws.file("stats.csv") + " --column ma" +
                           " --actual " + ws.file("actual.csv") + " --form linear" +
                           " --loss-model " + ws.file("loss.json") + " --report " +
                           ws.file("fit.json"));
    REQUIRE_MESSAGE(fit.code == 0, fit.err);
    auto fr = read_json(ws.file("fit.json"));
    CHECK(fr["slope"].get<double>() == doctest::Approx(15.0).epsilon(1e-6));
    CHECK(fr["intercept"].get<double>() == doctest::Approx(-4.0).epsilon(1e-4));
    CHECK(fr["r_squared"].get<double>() == doctest::Approx(1.0));

    auto pred = run(ws, "estimate-loss --stats " + ws.file("stats.csv") + " --column ma" +
                            " --loss-model " + ws.file("loss.json") + " --out " +
                            ws.file("pred.csv") + " --report " + ws.file("pred.json"));
    REQUIRE_MESSAGE(pred.code == 0, pred.err);
    double expected_total = 0.0;
    for (int t = 0; t < 24; ++t) expected_total += 15.0 * (1.0 + 0.25 * t) - 4.0;
    CHECK(read_json(ws.file("pred.json"))["total_predicted"].get<double>() ==
          doctest::Approx(expected_total).epsilon(1e-6));
}

TEST_CASE("error paths map to documented exit codes") {
    Workspace ws;
    synth::scenario_to_json_file(base_scenario(), ws.file("scenario.json"));
    REQUIRE(run(ws, "simulate --scenario " + ws.file("scenario.json") +
                        " --seed 31 --horizon 720 --out-prefix " + ws.file("tr"))
                .code == 0);
    REQUIRE(run(ws, "train --panel " + ws.file("tr_panel.csv") + " --roles " +
                        ws.file("tr_roles.csv") + " --scheme hour-of-day --out " +
                        ws.file("model.json"))
                .code == 0);

    // Panel whose sensors do not match the model: data error naming the sensor.
    {
        std::ofstream p(ws.file("alien.csv"));
        p << "timestamp,foo\n2020-01-01T00:00:00,1\n2020-01-01T01:00:00,2\n";
    }
    auto mism = run(ws, "detect --panel " + ws.file("alien.csv") + " --model " +
                            ws.file("model.json") + " --out " + ws.file("x.csv"));
    CHECK(mism.code == 2);
    CHECK(mism.err.find("s_n0_0") != std::string::npos);

    // Unknown flag and missing subcommand are usage errors.
    CHECK(run(ws, "detect --no-such-flag").code == 1);
    CHECK(run(ws, "").code == 1);

    // Missing file is a data error.
    CHECK(run(ws, "train --panel " + ws.file("absent.csv") + " --out " +
                      ws.file("m.json"))
              .code == 2);

    // Unusable clusters: hour-of-day on a tiny panel.
    REQUIRE(run(ws, "simulate --scenario " + ws.file("scenario.json") +
                        " --seed 32 --horizon 48 --out-prefix " + ws.file("tiny"))
                .code == 0);
    auto small = run(ws, "train --panel " + ws.file("tiny_panel.csv") + " --roles " +
                             ws.file("tiny_roles.csv") + " --scheme hour-of-day --out " +
                             ws.file("m2.json"));
    CHECK(small.code == 2);
    CHECK(small.err.find("insufficient data") != std::string::npos);
}
