#include "sicams/localization.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sicams/errors.hpp"

namespace sicams::loc {

using stat::Vec;

ZField z_field(const Vec& obs, const train::TrainedModel& model, int cluster,
               const ZFieldOptions& opts) {
    const auto& cm = model.cluster(cluster);
    if (obs.size() != cm.moments.mean.size())
        throw DataError("z_field: observation dimension mismatch");
    ZField out;
    out.sensor_ids = model.sensor_ids;
    for (Eigen::Index j = 0; j < obs.size(); ++j) {
        double sigma = std::sqrt(cm.moments.cov(j, j));
        if (sigma < opts.sigma_floor) {
            log_warning("z_field: sensor '" + model.sensor_ids[static_cast<std::size_t>(j)] +
                        "' has near-zero variance; applying floor");
            sigma = opts.sigma_floor;
        }
        double z = (obs(j) - cm.moments.mean(j)) / sigma;
        out.z.push_back(z);
        out.z2.push_back(z * z);
    }
    return out;
}

std::vector<double> contributions(const Vec& obs, const train::TrainedModel& model,
                                  int cluster) {
    const auto& cm = model.cluster(cluster);
    if (obs.size() != cm.moments.mean.size())
        throw DataError("contributions: observation dimension mismatch");
    Vec d = obs - cm.moments.mean;
    // S^{-1} d via the whitening factor: S^{-1} = w^T w.
    Vec sinv_d = cm.whitening.w.transpose() * (cm.whitening.w * d);
    std::vector<double> c(static_cast<std::size_t>(d.size()));
    for (Eigen::Index j = 0; j < d.size(); ++j)
        c[static_cast<std::size_t>(j)] = d(j) * sinv_d(j);
    return c;
}

namespace {

double neighbor_weight(const NetworkGraph&, double length, bool length_weighted) {
    return length_weighted ? 1.0 / length : 1.0;
}

// Gauss-Seidel relaxation of the harmonic system.
void gauss_seidel(const NetworkGraph& graph, NodeField& field, bool length_weighted,
                  double tol) {
    const std::size_t n = graph.nodes.size();
    for (int iter = 0; iter < 200000; ++iter) {
        double residual = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            if (field.fixed[v]) continue;
            double num = 0.0, den = 0.0;
            for (auto [u, len] : graph.adjacency[v]) {
                double w = neighbor_weight(graph, len, length_weighted);
                num += w * field.value[static_cast<std::size_t>(u)];
                den += w;
            }
            double nv = num / den;
            residual = std::max(residual, std::fabs(nv - field.value[v]));
            field.value[v] = nv;
        }
        if (residual < tol) return;
    }
    throw NumericalError("laplacian_interpolate: Gauss-Seidel did not converge");
}

}  // namespace

NodeField laplacian_interpolate(const NetworkGraph& graph,
                                const std::map<std::string, double>& fixed,
                                const InterpolateOptions& opts) {
    const std::size_t n = graph.nodes.size();
    NodeField field;
    field.value.assign(n, 0.0);
    field.fixed.assign(n, false);
    for (const auto& [sensor, value] : fixed) {
        int idx = graph.sensor_node.count(sensor) ? graph.sensor_node_index(sensor)
                                                  : graph.index_of(sensor);
        field.fixed[static_cast<std::size_t>(idx)] = true;
        field.value[static_cast<std::size_t>(idx)] = value;
    }

    // Every connected component must carry at least one fixed node.
    auto comp = graph.components();
    int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<bool> has_fixed(static_cast<std::size_t>(ncomp), false);
    for (std::size_t v = 0; v < n; ++v)
        if (field.fixed[v]) has_fixed[static_cast<std::size_t>(comp[v])] = true;
    for (std::size_t v = 0; v < n; ++v)
        if (!has_fixed[static_cast<std::size_t>(comp[v])])
            throw DataError("laplacian_interpolate: node '" + graph.nodes[v].id +
                            "' lies in a component with no fixed value");

    std::vector<int> free_index(n, -1);
    std::vector<std::size_t> free_nodes;
    for (std::size_t v = 0; v < n; ++v)
        if (!field.fixed[v]) {
            free_index[v] = static_cast<int>(free_nodes.size());
            free_nodes.push_back(v);
        }
    if (free_nodes.empty()) return field;

    if (n <= opts.direct_limit) {
        using Triplet = Eigen::Triplet<double>;
        std::vector<Triplet> trip;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free_nodes.size()));
        for (std::size_t i = 0; i < free_nodes.size(); ++i) {
            std::size_t v = free_nodes[i];
            double den = 0.0;
            for (auto [u, len] : graph.adjacency[v])
                den += neighbor_weight(graph, len, opts.length_weighted);
            trip.emplace_back(static_cast<int>(i), static_cast<int>(i), den);
            for (auto [u, len] : graph.adjacency[v]) {
                double w = neighbor_weight(graph, len, opts.length_weighted);
                auto uu = static_cast<std::size_t>(u);
                if (field.fixed[uu])
                    rhs(static_cast<Eigen::Index>(i)) += w * field.value[uu];
                else
                    trip.emplace_back(static_cast<int>(i), free_index[uu], -w);
            }
        }
        Eigen::SparseMatrix<double> a(static_cast<int>(free_nodes.size()),
                                      static_cast<int>(free_nodes.size()));
        a.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
        solver.compute(a);
        if (solver.info() != Eigen::Success)
            throw NumericalError("laplacian_interpolate: sparse factorization failed");
        Eigen::VectorXd sol = solver.solve(rhs);
        for (std::size_t i = 0; i < free_nodes.size(); ++i)
            field.value[free_nodes[i]] = sol(static_cast<Eigen::Index>(i));
    } else {
        gauss_seidel(graph, field, opts.length_weighted, opts.tolerance);
    }

    // Residual check on the harmonic property.
    double residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        if (field.fixed[v]) continue;
        double num = 0.0, den = 0.0;
        for (auto [u, len] : graph.adjacency[v]) {
            double w = neighbor_weight(graph, len, opts.length_weighted);
            num += w * field.value[static_cast<std::size_t>(u)];
            den += w;
        }
        residual = std::max(residual, std::fabs(field.value[v] - num / den));
    }
    if (residual > opts.tolerance * 10.0 + 1e-12)
        throw NumericalError("laplacian_interpolate: residual " + std::to_string(residual));
    return field;
}

LocateResult locate(const NodeField& field, const NetworkGraph& graph,
                    std::optional<std::pair<double, double>> truth, double radius) {
    LocateResult res;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < field.value.size(); ++v) {
        if (field.value[v] > best) {  // ties resolve to the lowest node index
            best = field.value[v];
            res.node = static_cast<int>(v);
        }
    }
    if (truth && res.node >= 0) {
        double dx = graph.nodes[static_cast<std::size_t>(res.node)].x - truth->first;
        double dy = graph.nodes[static_cast<std::size_t>(res.node)].y - truth->second;
        res.distance = std::sqrt(dx * dx + dy * dy);
        res.success = res.distance <= radius;
    }
    return res;
}

std::vector<Candidate> iterative_suppress(const NetworkGraph& graph,
                                          std::map<std::string, double> sensor_z2, int k,
                                          double radius, const InterpolateOptions& opts) {
    if (k < 1) throw UsageError("iterative_suppress: k must be >= 1");
    std::vector<Candidate> out;
    for (int round = 0; round < k; ++round) {
        bool any_live = false;
        for (const auto& [s, v] : sensor_z2)
            if (v > 0.0) any_live = true;
        if (!any_live) {
            log_warning("iterative_suppress: all sensors suppressed");
            out.push_back({-1, 0.0, true});
            continue;
        }
        NodeField field = laplacian_interpolate(graph, sensor_z2, opts);
        LocateResult top = locate(field, graph, std::nullopt, radius);
        out.push_back({top.node, field.value[static_cast<std::size_t>(top.node)], false});

        // Zero every sensor within shortest-path radius of the peak.
        auto dist = graph.shortest_paths(top.node);
        for (auto& [s, v] : sensor_z2) {
            int sn = graph.sensor_node.count(s) ? graph.sensor_node_index(s) : graph.index_of(s);
            if (dist[static_cast<std::size_t>(sn)] <= radius) v = 0.0;
        }
    }
    return out;
}

std::vector<double> share_profile(const ZField& z) {
    double total = 0.0;
    for (double v : z.z2) total += v;
    std::vector<double> s(z.z2.size(), 0.0);
    if (total > 0.0)
        for (std::size_t j = 0; j < z.z2.size(); ++j) s[j] = z.z2[j] / total;
    return s;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Leak: return "leak";
        case Verdict::SensorBias: return "sensor-bias";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict discriminate(const ZField& z,
                     const std::map<std::string, std::pair<double, double>>& bands,
                     const NetworkGraph& graph, const DiscriminateOptions& opts) {
    int out_of_band = 0;
    for (std::size_t j = 0; j < z.sensor_ids.size(); ++j) {
        auto it = bands.find(z.sensor_ids[j]);
        if (it == bands.end()) continue;
        if (z.z[j] < it->second.first || z.z[j] > it->second.second) ++out_of_band;
    }

    auto shares = share_profile(z);
    std::size_t top = 0;
    for (std::size_t j = 1; j < shares.size(); ++j)
        if (shares[j] > shares[top]) top = j;
    double top_share = shares.empty() ? 0.0 : shares[top];

    if (out_of_band == 1 && top_share > opts.concentration) return Verdict::SensorBias;

    if (out_of_band >= 2) {
        // Spatial coherence: graph neighbors of the top sensor hold at least
        // the required fraction of the remaining share.
        int tn = graph.sensor_node.count(z.sensor_ids[top])
                     ? graph.sensor_node_index(z.sensor_ids[top])
                     : graph.index_of(z.sensor_ids[top]);
        auto dist = graph.shortest_paths(tn);
        double neighbor_share = 0.0;
        for (std::size_t j = 0; j < shares.size(); ++j) {
            if (j == top) continue;
            int sn = graph.sensor_node.count(z.sensor_ids[j])
                         ? graph.sensor_node_index(z.sensor_ids[j])
                         : graph.index_of(z.sensor_ids[j]);
            if (dist[static_cast<std::size_t>(sn)] <= opts.neighbor_radius)
                neighbor_share += shares[j];
        }
        double remaining = 1.0 - top_share;
        if (remaining > 0.0 && neighbor_share / remaining >= opts.coherence_fraction)
            return Verdict::Leak;
    }
    return Verdict::Inconclusive;
}

}  // namespace sicams::loc
