#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "sicams/errors.hpp"
#include "sicams/synthgen.hpp"

using namespace sicams;
namespace fs = std::filesystem;

namespace {

synth::Scenario grid_scenario() {
    synth::Scenario sc;
    sc.rows = 4;
    sc.cols = 4;
    sc.daily_pattern = synth::default_daily_pattern();
    sc.sensor_nodes = {"n0_0", "n0_3", "n3_0", "n3_3", "n1_2"};
    return sc;
}

double column_mean(const SensorPanel& p, Eigen::Index j, std::size_t from = 0) {
    double sum = 0.0;
    for (Eigen::Index t = static_cast<Eigen::Index>(from); t < p.values.rows(); ++t)
        sum += p.values(t, j);
    return sum / static_cast<double>(p.values.rows() - static_cast<Eigen::Index>(from));
}

}  // namespace

TEST_CASE("zero noise reproduces the demand pattern exactly") {
    auto sc = grid_scenario();
    sc.noise = 0.0;
    sc.shared_factor = 0.0;
    auto gen = synth::generate(sc, 1, 48);
    REQUIRE(gen.panel.steps() == 48);
    REQUIRE(gen.panel.dim() == 5);
    for (std::size_t t = 0; t < 48; ++t) {
        double expected = sc.daily_pattern[t % 24] * sc.base_level;
        for (Eigen::Index j = 0; j < gen.panel.dim(); ++j)
            CHECK(gen.panel.values(static_cast<Eigen::Index>(t), j) ==
                  doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(gen.truth.events.empty());
    for (int c : gen.truth.counts.count) CHECK(c == 0);
}

TEST_CASE("generation is deterministic per seed") {
    auto sc = grid_scenario();
    auto a = synth::generate(sc, 42, 200);
    auto b = synth::generate(sc, 42, 200);
    CHECK((a.panel.values - b.panel.values).cwiseAbs().maxCoeff() == 0.0);

    auto c = synth::generate(sc, 43, 200);
    CHECK((a.panel.values - c.panel.values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("noise level and spatial correlation behave as configured") {
    auto sc = grid_scenario();
    sc.noise = 0.08;
    sc.shared_factor = 0.0;  // isolate the nodal component
    sc.corr_length = 200.0;
    auto gen = synth::generate(sc, 7, 6000);

    // Coefficient of variation within a fixed hour-of-day matches the noise.
    for (Eigen::Index j = 0; j < gen.panel.dim(); ++j) {
        std::vector<double> hour9;
        for (std::size_t t = 9; t < 6000; t += 24)
            hour9.push_back(gen.panel.values(static_cast<Eigen::Index>(t), j));
        double m = 0, s2 = 0;
        for (double v : hour9) m += v;
        m /= static_cast<double>(hour9.size());
        for (double v : hour9) s2 += (v - m) * (v - m);
        double cov = std::sqrt(s2 / static_cast<double>(hour9.size() - 1)) / m;
        CHECK(std::fabs(cov - sc.noise) / sc.noise < 0.10);
    }

    // Residual correlation decreases with graph distance.
    auto resid = [&](Eigen::Index j) {
        std::vector<double> r;
        for (std::size_t t = 0; t < 6000; ++t) {
            double base = sc.daily_pattern[t % 24] * sc.base_level;
            r.push_back(gen.panel.values(static_cast<Eigen::Index>(t), j) / base - 1.0);
        }
        return r;
    };
    auto corr = [&](Eigen::Index a, Eigen::Index b) {
        auto ra = resid(a), rb = resid(b);
        double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
        double n = static_cast<double>(ra.size());
        for (std::size_t i = 0; i < ra.size(); ++i) {
            sa += ra[i];
            sb += rb[i];
            sab += ra[i] * rb[i];
            saa += ra[i] * ra[i];
            sbb += rb[i] * rb[i];
        }
        return (n * sab - sa * sb) /
               std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
    };
    // Sensors n0_0 and n1_2 (close) versus n0_0 and n3_3 (far).
    double near = corr(0, 4);
    double far = corr(0, 3);
    CHECK(near > far);
    CHECK(near > 0.0);
}

TEST_CASE("abrupt leak depresses the nearest sensor most") {
    auto sc = grid_scenario();
    sc.noise = 0.02;
    sc.decay_lambda = 300.0;
    synth::ScenarioEvent ev;
    ev.record.id = "n0_1";  // closest to sensor n0_0
    ev.record.kind = EventKind::Abrupt;
    ev.record.magnitude = 40.0;
    ev.record.start = 500 * 3600;
    auto gen = synth::generate(sc, 9, 4000);

    sc.events.push_back(ev);
    auto leaky = synth::generate(sc, 9, 4000);

    // Mean deficit per sensor after onset, relative to the same-seed baseline.
    int leak_node = gen.graph.index_of("n0_1");
    auto dist = gen.graph.shortest_paths(leak_node);
    std::vector<double> deficit, expected;
    for (Eigen::Index j = 0; j < gen.panel.dim(); ++j) {
        deficit.push_back(column_mean(gen.panel, j, 500) - column_mean(leaky.panel, j, 500));
        double d = dist[static_cast<std::size_t>(
            gen.graph.index_of(sc.sensor_nodes[static_cast<std::size_t>(j)]))];
        expected.push_back(40.0 * sc.deficit_per_flow * std::exp(-d / sc.decay_lambda));
    }
    auto top = std::distance(deficit.begin(), std::max_element(deficit.begin(), deficit.end()));
    CHECK(top == 0);  // n0_0
    for (std::size_t j = 0; j < deficit.size(); ++j)
        CHECK(deficit[j] == doctest::Approx(expected[j]).epsilon(0.15));

    // Ground truth bookkeeping.
    REQUIRE(leaky.truth.events.size() == 1);
    CHECK(leaky.truth.events[0].id == "n0_1");
    CHECK(leaky.truth.outflow[0][499] == 0.0);
    CHECK(leaky.truth.outflow[0][500] == doctest::Approx(40.0));
    CHECK(leaky.truth.counts.count[499] == 0);
    CHECK(leaky.truth.counts.count[500] == 1);
    CHECK(leaky.truth.locations[0].first ==
          doctest::Approx(gen.graph.nodes[static_cast<std::size_t>(leak_node)].x));
}

TEST_CASE("incipient leak ramps to a plateau") {
    synth::ScenarioEvent ev;
    ev.record.kind = EventKind::Incipient;
    ev.record.magnitude = 30.0;
    ev.record.start = 10 * 3600;
    ev.ramp_steps = 20;

    double prev = -1.0;
    for (long k = 0; k < 20; ++k) {
        double f = synth::event_outflow(ev, (10 + k) * 3600, 3600);
        CHECK(f >= prev);
        prev = f;
    }
    CHECK(synth::event_outflow(ev, 9 * 3600, 3600) == 0.0);
    CHECK(synth::event_outflow(ev, 30 * 3600, 3600) == doctest::Approx(30.0));
    CHECK(synth::event_outflow(ev, 500 * 3600, 3600) == doctest::Approx(30.0));

    synth::ScenarioEvent abrupt;
    abrupt.record.kind = EventKind::Abrupt;
    abrupt.record.magnitude = 12.0;
    abrupt.record.start = 0;
    abrupt.record.end = 5 * 3600;
    CHECK(synth::event_outflow(abrupt, 2 * 3600, 3600) == doctest::Approx(12.0));
    CHECK(synth::event_outflow(abrupt, 6 * 3600, 3600) == 0.0);
}

TEST_CASE("scenario JSON round trip") {
    auto dir = fs::temp_directory_path() /
               ("sicams_synth_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    auto path = (dir / "scenario.json").string();

    auto sc = grid_scenario();
    sc.noise = 0.05;
    sc.corr_length = 321.0;
    synth::ScenarioEvent ev;
    ev.record.id = "n1_1";
    ev.record.kind = EventKind::Incipient;
    ev.record.magnitude = 25.0;
    ev.record.start = 1000 * 3600;
    ev.ramp_steps = 48;
    sc.events.push_back(ev);

    synth::scenario_to_json_file(sc, path);
    auto back = synth::scenario_from_json_file(path);
    CHECK(back.rows == sc.rows);
    CHECK(back.sensor_nodes == sc.sensor_nodes);
    CHECK(back.noise == sc.noise);
    CHECK(back.corr_length == sc.corr_length);
    CHECK(back.daily_pattern == sc.daily_pattern);
    REQUIRE(back.events.size() == 1);
    CHECK(back.events[0].record.id == "n1_1");
    CHECK(back.events[0].ramp_steps == 48);

    // Round-tripped scenarios generate identical panels.
    auto a = synth::generate(sc, 3, 100);
    auto b = synth::generate(back, 3, 100);
    CHECK((a.panel.values - b.panel.values).cwiseAbs().maxCoeff() == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("validation") {
    auto sc = grid_scenario();
    sc.sensor_nodes.push_back("n9_9");  // not on a 4x4 grid
    CHECK_THROWS_WITH_AS(static_cast<void>(synth::generate(sc, 1, 10)),
                         doctest::Contains("n9_9"), DataError);

    auto bad = grid_scenario();
    bad.noise = 1.5;
    CHECK_THROWS_AS(static_cast<void>(synth::generate(bad, 1, 10)), UsageError);

    auto ring = grid_scenario();
    ring.graph_kind = synth::GraphKind::RingWithChords;
    ring.sensor_nodes = {"n0", "n6", "n12"};
    auto gr = synth::generate(ring, 5, 50);
    CHECK(gr.graph.nodes.size() == static_cast<std::size_t>(ring.ring_nodes));
    CHECK(gr.panel.dim() == 3);
}
