#ifndef SICAMS_LOCALIZATION_HPP
#define SICAMS_LOCALIZATION_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sicams/graph.hpp"
#include "sicams/statcore.hpp"
#include "sicams/training.hpp"

namespace sicams::loc {

/// Per-sensor z and z^2 relative to a cluster's marginal moments.
struct ZField {
    std::vector<std::string> sensor_ids;
    std::vector<double> z;
    std::vector<double> z2;
};

struct ZFieldOptions {
    double sigma_floor = 1e-9;  // applied with a warning instead of erroring
};

ZField z_field(const stat::Vec& obs, const train::TrainedModel& model, int cluster,
               const ZFieldOptions& opts = {});

/// Sensor-wise decomposition c_j = (x - mean)_j * [S^{-1} (x - mean)]_j;
/// the components sum to T^2. Values may be negative.
std::vector<double> contributions(const stat::Vec& obs, const train::TrainedModel& model,
                                  int cluster);

struct NodeField {
    std::vector<double> value;  // per graph node
    std::vector<bool> fixed;    // true at sensor (support) nodes
};

struct InterpolateOptions {
    std::size_t direct_limit = 10000;  // sparse direct solve up to this many nodes
    double tolerance = 1e-8;           // Gauss-Seidel residual max-norm
    bool length_weighted = false;      // inverse-edge-length weighting variant
};

/// Harmonic interpolation of fixed sensor-node values over the graph:
/// every free node equals the (unweighted) mean of its neighbors.
NodeField laplacian_interpolate(const NetworkGraph& graph,
                                const std::map<std::string, double>& fixed,
                                const InterpolateOptions& opts = {});

struct LocateResult {
    int node = -1;
    double distance = 0.0;  // Euclidean meters to truth, when given
    bool success = false;   // distance <= radius
};

LocateResult locate(const NodeField& field, const NetworkGraph& graph,
                    std::optional<std::pair<double, double>> truth, double radius);

struct Candidate {
    int node = -1;
    double peak = 0.0;
    bool exhausted = false;  // all sensors were suppressed before this pick
};

/// Repeat k times: interpolate, take the argmax sensor, then zero the z^2 of
/// every sensor within shortest-path `radius` of it.
std::vector<Candidate> iterative_suppress(const NetworkGraph& graph,
                                          std::map<std::string, double> sensor_z2, int k,
                                          double radius,
                                          const InterpolateOptions& opts = {});

enum class Verdict { Leak, SensorBias, Inconclusive };

std::string verdict_name(Verdict v);

struct DiscriminateOptions {
    double concentration = 0.9;     // sensor-bias share threshold
    double coherence_fraction = 0.25;
    double neighbor_radius = 300.0; // graph meters defining "neighbors" of the top sensor
};

/// Rule: exactly one out-of-band sensor with a dominant share -> sensor-bias;
/// two or more out-of-band with spatially coherent shares -> leak; else
/// inconclusive.
Verdict discriminate(const ZField& z, const std::map<std::string, std::pair<double, double>>& bands,
                     const NetworkGraph& graph, const DiscriminateOptions& opts = {});

/// Share profile s_j = z_j^2 / sum z^2 (empty total -> all zeros).
std::vector<double> share_profile(const ZField& z);

}  // namespace sicams::loc

#endif
