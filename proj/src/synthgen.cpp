#include "sicams/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "sicams/errors.hpp"

namespace sicams::synth {

using nlohmann::json;

std::array<double, 24> default_daily_pattern() {
    // Night trough, morning and evening peaks.
    return {0.75, 0.70, 0.68, 0.68, 0.72, 0.85, 1.05, 1.20, 1.15, 1.05, 1.00, 1.00,
            1.02, 1.00, 0.98, 1.00, 1.05, 1.15, 1.25, 1.20, 1.10, 1.00, 0.90, 0.80};
}

loc::NetworkGraph build_graph(const Scenario& scenario) {
    if (scenario.graph_kind == GraphKind::Grid)
        return loc::make_grid(scenario.rows, scenario.cols, scenario.edge_length);
    return loc::make_ring_with_chords(scenario.ring_nodes, scenario.chords,
                                      scenario.edge_length);
}

double event_outflow(const ScenarioEvent& ev, Timestamp t, Timestamp step_seconds) {
    const EventRecord& r = ev.record;
    if (t < r.start || (r.end && t > *r.end)) return 0.0;
    if (r.kind == EventKind::Abrupt || ev.ramp_steps <= 0) return r.magnitude;
    double elapsed = static_cast<double>(t - r.start) / static_cast<double>(step_seconds);
    double frac = std::min(1.0, elapsed / static_cast<double>(ev.ramp_steps));
    return frac * r.magnitude;
}

Generated generate(const Scenario& scenario, std::uint64_t seed, std::size_t horizon) {
    if (!(scenario.noise >= 0.0 && scenario.noise < 1.0))
        throw UsageError("generate: noise fraction must lie in [0, 1)");
    Generated out;
    out.graph = build_graph(scenario);
    const std::size_t s = scenario.sensor_nodes.size();
    if (s == 0) throw UsageError("generate: scenario places no sensors");

    // Bind sensors and collect per-sensor node distances.
    std::vector<int> sensor_idx(s);
    std::vector<std::vector<double>> dist(s);
    for (std::size_t j = 0; j < s; ++j) {
        const std::string& node = scenario.sensor_nodes[j];
        if (!out.graph.node_index.count(node))
            throw DataError("generate: sensor node '" + node + "' absent from the graph");
        out.graph.bind_sensor("s_" + node, node);
        sensor_idx[j] = out.graph.index_of(node);
        dist[j] = out.graph.shortest_paths(sensor_idx[j]);
    }

    const std::size_t nv = out.graph.nodes.size();
    // Spatially correlated nodal noise: sensor j reads a unit-variance blend
    // of nodal shocks weighted by exp(-d / corr_length).
    std::vector<std::vector<double>> weights(s, std::vector<double>(nv));
    for (std::size_t j = 0; j < s; ++j) {
        double norm = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
            double w = std::exp(-dist[j][v] / scenario.corr_length);
            weights[j][v] = w;
            norm += w * w;
        }
        norm = std::sqrt(norm);
        for (std::size_t v = 0; v < nv; ++v) weights[j][v] /= norm;
    }

    const double sigma_g =
        scenario.shared_factor >= 0.0 ? scenario.shared_factor : scenario.noise / 2.0;
    const double sigma_i2 = scenario.noise * scenario.noise - sigma_g * sigma_g;
    if (sigma_i2 < 0.0)
        throw UsageError("generate: shared factor exceeds the total noise std");
    const double sigma_i = std::sqrt(sigma_i2);

    // Leak events and their locations.
    std::vector<const ScenarioEvent*> leaks;
    std::vector<std::vector<double>> leak_dist;
    for (const auto& ev : scenario.events) {
        out.truth.events.push_back(ev.record);
        if (ev.record.kind == EventKind::SensorBias) {
            // Bias events name a sensor id; locate at the bound node.
            std::string id = ev.record.id;
            if (id.rfind("s_", 0) == 0) id = id.substr(2);
            int node = out.graph.index_of(id);
            out.truth.locations.emplace_back(out.graph.nodes[node].x, out.graph.nodes[node].y);
            continue;
        }
        int node = out.graph.index_of(ev.record.id);
        out.truth.locations.emplace_back(out.graph.nodes[node].x, out.graph.nodes[node].y);
        leaks.push_back(&ev);
        leak_dist.push_back(out.graph.shortest_paths(node));
    }

    // Panel skeleton.
    out.panel.values.resize(static_cast<Eigen::Index>(horizon), static_cast<Eigen::Index>(s));
    out.panel.timestamps.resize(horizon);
    for (std::size_t j = 0; j < s; ++j)
        out.panel.sensors.push_back(
            {"s_" + scenario.sensor_nodes[j], SensorRole::Pressure, scenario.sensor_nodes[j]});

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> shocks(nv);
    out.truth.outflow.assign(scenario.events.size(), std::vector<double>(horizon, 0.0));

    for (std::size_t t = 0; t < horizon; ++t) {
        Timestamp ts = scenario.start_time +
                       static_cast<Timestamp>(t) * scenario.step_seconds;
        out.panel.timestamps[t] = ts;
        int hour = static_cast<int>(((ts % 86400) + 86400) % 86400 / 3600);
        double pattern = scenario.daily_pattern[static_cast<std::size_t>(hour)];

        double g = normal(rng);
        for (std::size_t v = 0; v < nv; ++v) shocks[v] = normal(rng);

        for (std::size_t j = 0; j < s; ++j) {
            double idio = 0.0;
            for (std::size_t v = 0; v < nv; ++v) idio += weights[j][v] * shocks[v];
            double eps = sigma_g * g + sigma_i * idio;
            double x = pattern * scenario.base_level * (1.0 + eps);

            for (std::size_t e = 0; e < leaks.size(); ++e) {
                double flow = event_outflow(*leaks[e], ts, scenario.step_seconds);
                if (flow <= 0.0) continue;
                x -= flow * scenario.deficit_per_flow *
                     std::exp(-leak_dist[e][static_cast<std::size_t>(sensor_idx[j])] /
                              scenario.decay_lambda);
            }
            out.panel.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = x;
        }

        // Sensor-bias offsets and per-event outflow bookkeeping.
        for (std::size_t e = 0; e < scenario.events.size(); ++e) {
            const auto& ev = scenario.events[e];
            if (ev.record.kind == EventKind::SensorBias) {
                if (ts >= ev.record.start && (!ev.record.end || ts <= *ev.record.end)) {
                    int col = out.panel.sensor_index(ev.record.id);
                    if (col < 0)
                        throw DataError("generate: bias event names unknown sensor '" +
                                        ev.record.id + "'");
                    out.panel.values(static_cast<Eigen::Index>(t), col) += ev.record.magnitude;
                }
            } else {
                out.truth.outflow[e][t] = event_outflow(ev, ts, scenario.step_seconds);
            }
        }
    }

    std::vector<EventRecord> leak_records;
    for (const auto& ev : scenario.events)
        if (ev.record.kind != EventKind::SensorBias) leak_records.push_back(ev.record);
    out.truth.counts = detect::leak_count_from_events(leak_records, out.panel.timestamps);
    return out;
}

namespace {

ScenarioEvent event_from_json(const json& j) {
    ScenarioEvent ev;
    ev.record.id = j.at("id").get<std::string>();
    ev.record.kind = parse_event_kind(j.value("kind", "abrupt"));
    ev.record.magnitude = j.at("magnitude").get<double>();
    ev.record.start = parse_iso8601(j.at("start").get<std::string>());
    if (j.contains("end")) ev.record.end = parse_iso8601(j.at("end").get<std::string>());
    ev.ramp_steps = j.value("ramp_steps", 0L);
    return ev;
}

json event_to_json(const ScenarioEvent& ev) {
    json j;
    j["id"] = ev.record.id;
    j["kind"] = event_kind_name(ev.record.kind);
    j["magnitude"] = ev.record.magnitude;
    j["start"] = format_iso8601(ev.record.start);
    if (ev.record.end) j["end"] = format_iso8601(*ev.record.end);
    if (ev.ramp_steps > 0) j["ramp_steps"] = ev.ramp_steps;
    return j;
}

}  // namespace

Scenario scenario_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("scenario file '" + path + "': " + e.what());
    }
    Scenario s;
    std::string kind = j.value("graph", json::object()).value("kind", "grid");
    const json& g = j.value("graph", json::object());
    if (kind == "grid") {
        s.graph_kind = GraphKind::Grid;
        s.rows = g.value("rows", s.rows);
        s.cols = g.value("cols", s.cols);
    } else if (kind == "ring-with-chords") {
        s.graph_kind = GraphKind::RingWithChords;
        s.ring_nodes = g.value("nodes", s.ring_nodes);
        s.chords = g.value("chords", s.chords);
    } else {
        throw DataError("scenario file '" + path + "': unknown graph kind '" + kind + "'");
    }
    s.edge_length = g.value("edge_length_m", s.edge_length);
    s.sensor_nodes = j.at("sensors").get<std::vector<std::string>>();
    if (j.contains("daily_pattern")) {
        auto p = j["daily_pattern"].get<std::vector<double>>();
        if (p.size() != 24)
            throw DataError("scenario file '" + path + "': daily_pattern needs 24 entries");
        std::copy(p.begin(), p.end(), s.daily_pattern.begin());
    } else {
        s.daily_pattern = default_daily_pattern();
    }
    s.base_level = j.value("base_level", s.base_level);
    s.noise = j.value("noise", s.noise);
    s.shared_factor = j.value("shared_factor", s.shared_factor);
    s.corr_length = j.value("corr_length_m", s.corr_length);
    s.decay_lambda = j.value("decay_lambda_m", s.decay_lambda);
    s.deficit_per_flow = j.value("deficit_per_flow", s.deficit_per_flow);
    if (j.contains("start_time")) s.start_time = parse_iso8601(j["start_time"].get<std::string>());
    s.step_seconds = j.value("step_seconds", s.step_seconds);
    for (const auto& ej : j.value("events", json::array())) s.events.push_back(event_from_json(ej));
    return s;
}

void scenario_to_json_file(const Scenario& s, const std::string& path) {
    json j;
    if (s.graph_kind == GraphKind::Grid)
        j["graph"] = {{"kind", "grid"}, {"rows", s.rows}, {"cols", s.cols},
                      {"edge_length_m", s.edge_length}};
    else
        j["graph"] = {{"kind", "ring-with-chords"}, {"nodes", s.ring_nodes},
                      {"chords", s.chords}, {"edge_length_m", s.edge_length}};
    j["sensors"] = s.sensor_nodes;
    j["daily_pattern"] = std::vector<double>(s.daily_pattern.begin(), s.daily_pattern.end());
    j["base_level"] = s.base_level;
    j["noise"] = s.noise;
    j["shared_factor"] = s.shared_factor;
    j["corr_length_m"] = s.corr_length;
    j["decay_lambda_m"] = s.decay_lambda;
    j["deficit_per_flow"] = s.deficit_per_flow;
    j["start_time"] = format_iso8601(s.start_time);
    j["step_seconds"] = s.step_seconds;
    json evs = json::array();
    for (const auto& ev : s.events) evs.push_back(event_to_json(ev));
    j["events"] = evs;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write scenario file '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace sicams::synth
