#ifndef SICAMS_SYNTHGEN_HPP
#define SICAMS_SYNTHGEN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sicams/detection.hpp"
#include "sicams/events.hpp"
#include "sicams/graph.hpp"
#include "sicams/panel.hpp"

namespace sicams::synth {

enum class GraphKind { Grid, RingWithChords };

struct ScenarioEvent {
    EventRecord record;   // id: leak node (leaks) or sensor id (bias events)
    long ramp_steps = 0;  // incipient: steps until the outflow plateaus
};

/// Desk-scale stand-in for hydraulic simulation: a synthetic network with a
/// daily demand pattern, spatially correlated multiplicative noise, and
/// injectable leak / sensor-bias events with known ground truth.
struct Scenario {
    GraphKind graph_kind = GraphKind::Grid;
    int rows = 10, cols = 10;           // Grid
    int ring_nodes = 24, chords = 4;    // RingWithChords
    double edge_length = 100.0;         // meters

    std::vector<std::string> sensor_nodes;
    std::array<double, 24> daily_pattern{};  // per-hour mean-level multipliers
    double base_level = 50.0;                // native pressure units
    double noise = 0.1;                      // multiplicative Gaussian std fraction
    double shared_factor = -1.0;             // global-demand noise std; < 0 -> noise / 2
    double corr_length = 500.0;              // noise spatial correlation scale, meters
    double decay_lambda = 500.0;             // leak-deficit propagation scale, meters
    double deficit_per_flow = 0.4;           // pressure units per m^3/h at the leak node

    Timestamp start_time = 0;
    Timestamp step_seconds = 3600;

    std::vector<ScenarioEvent> events;
};

struct GroundTruth {
    std::vector<EventRecord> events;
    std::vector<std::vector<double>> outflow;  // per event, per step, m^3/h
    detect::LeakCountSeries counts;
    std::vector<std::pair<double, double>> locations;  // per event (x, y); bias: sensor node
};

struct Generated {
    SensorPanel panel;
    GroundTruth truth;
    loc::NetworkGraph graph;
};

loc::NetworkGraph build_graph(const Scenario& scenario);

/// Deterministic per seed. Baseline at sensor j: pattern(hour) * base *
/// (1 + eps), eps mixing a shared-demand factor with spatially correlated
/// nodal noise; each leak subtracts magnitude(t) * deficit_per_flow *
/// exp(-d(leak, j) / lambda) with d the shortest-path distance.
Generated generate(const Scenario& scenario, std::uint64_t seed, std::size_t horizon);

/// Time profile of a leak's outflow in m^3/h at a given step offset from its
/// start (abrupt step or incipient ramp-to-plateau).
double event_outflow(const ScenarioEvent& ev, Timestamp t, Timestamp step_seconds);

Scenario scenario_from_json_file(const std::string& path);
void scenario_to_json_file(const Scenario& scenario, const std::string& path);

/// A default 24-hour demand shape (night trough, morning/evening peaks).
std::array<double, 24> default_daily_pattern();

}  // namespace sicams::synth

#endif
