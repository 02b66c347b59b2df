#ifndef SICAMS_GRAPH_HPP
#define SICAMS_GRAPH_HPP

#include <map>
#include <string>
#include <vector>

namespace sicams::loc {

struct Node {
    std::string id;
    double x = 0.0;  // planar meters
    double y = 0.0;
};

struct Edge {
    std::string id;
    int u = 0;  // node indices
    int v = 0;
    double length = 0.0;  // meters
};

/// Undirected network graph with planar coordinates and edge lengths, plus a
/// sensor -> node binding.
struct NetworkGraph {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::map<std::string, int> node_index;            // id -> index
    std::map<std::string, std::string> sensor_node;   // sensor id -> node id
    std::vector<std::vector<std::pair<int, double>>> adjacency;  // (neighbor, length)

    int add_node(const std::string& id, double x, double y);
    void add_edge(const std::string& id, const std::string& u, const std::string& v,
                  double length);
    void bind_sensor(const std::string& sensor_id, const std::string& node_id);

    int index_of(const std::string& node_id) const;  // throws DataError when absent
    int sensor_node_index(const std::string& sensor_id) const;

    double euclidean(int a, int b) const;
    /// Shortest-path distances (edge lengths) from a source node, Dijkstra.
    std::vector<double> shortest_paths(int source) const;
    /// Connected component label per node.
    std::vector<int> components() const;
};

/// Regular m x n grid with the given spacing (node ids "n<row>_<col>").
NetworkGraph make_grid(int rows, int cols, double spacing);

/// Ring of `n` nodes with `chords` evenly spread chords, radius derived from
/// the edge length.
NetworkGraph make_ring_with_chords(int n, int chords, double edge_length);

}  // namespace sicams::loc

#endif
