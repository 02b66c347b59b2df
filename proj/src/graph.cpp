#include "sicams/graph.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include "sicams/errors.hpp"

namespace sicams::loc {

int NetworkGraph::add_node(const std::string& id, double x, double y) {
    if (node_index.count(id)) throw DataError("duplicate node id '" + id + "'");
    int idx = static_cast<int>(nodes.size());
    nodes.push_back({id, x, y});
    node_index[id] = idx;
    adjacency.emplace_back();
    return idx;
}

void NetworkGraph::add_edge(const std::string& id, const std::string& u, const std::string& v,
                            double length) {
    int ui = index_of(u);
    int vi = index_of(v);
    if (ui == vi) throw DataError("self-loop edge '" + id + "' at node '" + u + "'");
    if (!(length > 0.0)) throw DataError("edge '" + id + "' has non-positive length");
    edges.push_back({id, ui, vi, length});
    adjacency[static_cast<std::size_t>(ui)].emplace_back(vi, length);
    adjacency[static_cast<std::size_t>(vi)].emplace_back(ui, length);
}

void NetworkGraph::bind_sensor(const std::string& sensor_id, const std::string& node_id) {
    if (!node_index.count(node_id))
        throw DataError("sensor '" + sensor_id + "' bound to unknown node '" + node_id + "'");
    sensor_node[sensor_id] = node_id;
}

int NetworkGraph::index_of(const std::string& node_id) const {
    auto it = node_index.find(node_id);
    if (it == node_index.end()) throw DataError("unknown node id '" + node_id + "'");
    return it->second;
}

int NetworkGraph::sensor_node_index(const std::string& sensor_id) const {
    auto it = sensor_node.find(sensor_id);
    if (it == sensor_node.end())
        throw DataError("sensor '" + sensor_id + "' has no node binding");
    return index_of(it->second);
}

double NetworkGraph::euclidean(int a, int b) const {
    double dx = nodes[static_cast<std::size_t>(a)].x - nodes[static_cast<std::size_t>(b)].x;
    double dy = nodes[static_cast<std::size_t>(a)].y - nodes[static_cast<std::size_t>(b)].y;
    return std::sqrt(dx * dx + dy * dy);
}

std::vector<double> NetworkGraph::shortest_paths(int source) const {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(nodes.size(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(source)] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (auto [v, w] : adjacency[static_cast<std::size_t>(u)]) {
            double nd = d + w;
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    return dist;
}

std::vector<int> NetworkGraph::components() const {
    std::vector<int> comp(nodes.size(), -1);
    int c = 0;
    for (std::size_t start = 0; start < nodes.size(); ++start) {
        if (comp[start] >= 0) continue;
        std::queue<int> q;
        q.push(static_cast<int>(start));
        comp[start] = c;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (auto [v, w] : adjacency[static_cast<std::size_t>(u)]) {
                (void)w;
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = c;
                    q.push(v);
                }
            }
        }
        ++c;
    }
    return comp;
}

NetworkGraph make_grid(int rows, int cols, double spacing) {
    if (rows < 1 || cols < 1 || !(spacing > 0.0))
        throw UsageError("make_grid: invalid dimensions");
    NetworkGraph g;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            g.add_node("n" + std::to_string(r) + "_" + std::to_string(c), c * spacing,
                       r * spacing);
    auto id = [cols](int r, int c) { return r * cols + c; };
    int e = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols)
                g.add_edge("e" + std::to_string(e++), g.nodes[id(r, c)].id,
                           g.nodes[id(r, c + 1)].id, spacing);
            if (r + 1 < rows)
                g.add_edge("e" + std::to_string(e++), g.nodes[id(r, c)].id,
                           g.nodes[id(r + 1, c)].id, spacing);
        }
    return g;
}

NetworkGraph make_ring_with_chords(int n, int chords, double edge_length) {
    if (n < 3 || chords < 0 || !(edge_length > 0.0))
        throw UsageError("make_ring_with_chords: invalid parameters");
    NetworkGraph g;
    const double pi = 3.14159265358979323846;
    const double radius = edge_length / (2.0 * std::sin(pi / n));
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * pi * i / n;
        g.add_node("n" + std::to_string(i), radius * std::cos(a), radius * std::sin(a));
    }
    int e = 0;
    for (int i = 0; i < n; ++i)
        g.add_edge("e" + std::to_string(e++), g.nodes[i].id, g.nodes[(i + 1) % n].id,
                   edge_length);
    for (int c = 0; c < chords; ++c) {
        int a = (c * n) / std::max(1, chords);
        int b = (a + n / 2) % n;
        if (a == b) continue;
        double len = std::hypot(g.nodes[a].x - g.nodes[b].x, g.nodes[a].y - g.nodes[b].y);
        g.add_edge("c" + std::to_string(c), g.nodes[a].id, g.nodes[b].id, len);
    }
    return g;
}

}  // namespace sicams::loc
