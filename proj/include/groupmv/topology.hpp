#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace groupmv {

enum class GraphKind { HeavyHex, Grid, Ring, Custom };

inline const char* to_string(GraphKind k) {
    switch (k) {
        case GraphKind::HeavyHex: return "heavy_hex";
        case GraphKind::Grid: return "grid";
        case GraphKind::Ring: return "ring";
        default: return "custom";
    }
}

// Undirected hardware connectivity graph. Node indices are 0..node_count-1,
// no self loops, no duplicate edges, always connected.
class CouplingGraph {
public:
    CouplingGraph() = default;

    CouplingGraph(int node_count, std::vector<std::pair<int, int>> edges,
                  GraphKind kind = GraphKind::Custom)
        : n_(node_count), kind_(kind) {
        if (node_count < 1) throw std::invalid_argument("graph needs at least one node");
        adj_.resize(n_);
        std::set<std::pair<int, int>> seen;
        for (auto [u, v] : edges) {
            if (u == v) throw std::invalid_argument("self loop");
            if (u < 0 || v < 0 || u >= n_ || v >= n_)
                throw std::invalid_argument("edge endpoint out of range");
            auto e = std::minmax(u, v);
            if (!seen.insert({e.first, e.second}).second) continue;
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        edges_.assign(seen.begin(), seen.end());
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
        if (!is_connected()) throw std::invalid_argument("coupling graph must be connected");
    }

    int node_count() const { return n_; }
    GraphKind kind() const { return kind_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int u) const { return adj_.at(u); }
    int degree(int u) const { return static_cast<int>(adj_.at(u).size()); }

    bool has_edge(int u, int v) const {
        const auto& nb = adj_.at(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    void set_layout(std::vector<std::pair<double, double>> coords) {
        layout_ = std::move(coords);
    }
    const std::optional<std::vector<std::pair<double, double>>>& layout() const {
        return layout_;
    }

    // BFS distances from `start` to every node (-1 if unreachable, which
    // cannot happen for a constructed graph).
    std::vector<int> bfs_distances(int start) const {
        std::vector<int> dist(n_, -1);
        std::queue<int> q;
        dist[start] = 0;
        q.push(start);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj_[u])
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
        }
        return dist;
    }

    // Edge-list text dump: header `nodes <count>`, then one `u v` per line.
    std::string dump_edge_list() const {
        std::ostringstream out;
        out << "nodes " << n_ << "\n";
        for (auto [u, v] : edges_) out << u << " " << v << "\n";
        return out.str();
    }

private:
    bool is_connected() const {
        if (n_ == 0) return false;
        auto d = bfs_distances(0);
        return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
    }

    int n_ = 0;
    GraphKind kind_ = GraphKind::Custom;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
    std::optional<std::vector<std::pair<double, double>>> layout_;
};

// rows x cols square lattice; node index = row * cols + col.
inline CouplingGraph make_grid(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be positive");
    if (rows * cols < 2) throw std::invalid_argument("grid needs at least two nodes");
    std::vector<std::pair<int, int>> edges;
    std::vector<std::pair<double, double>> coords;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            int u = r * cols + c;
            coords.emplace_back(c, r);
            if (c + 1 < cols) edges.emplace_back(u, u + 1);
            if (r + 1 < rows) edges.emplace_back(u, u + cols);
        }
    CouplingGraph g(rows * cols, std::move(edges), GraphKind::Grid);
    g.set_layout(std::move(coords));
    return g;
}

inline CouplingGraph make_ring(int n) {
    if (n < 3) throw std::invalid_argument("ring needs at least three nodes");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return CouplingGraph(n, std::move(edges), GraphKind::Ring);
}

// Heavy-hex lattice with cell_rows x cell_cols hexagonal cells.
//
// Construction: the hexagon corners live on a brick-wall point lattice.
// Cell (r, c) spans point rows r..r+1 and point columns j0..j0+2 with
// j0 = 2c + (r % 2); its six corner points are the top and bottom rows of
// that span, its edges are the four horizontal segments plus the two outer
// verticals. Corner points shared between cells are merged. Every corner
// edge is then subdivided by one extra qubit, giving the degree-2 "heavy"
// qubits. Numbering: corner qubits first in row-major (point row, point
// column) order, then edge qubits ordered by their (low, high) corner pair.
inline CouplingGraph make_heavy_hex(int cell_rows, int cell_cols) {
    if (cell_rows < 1 || cell_cols < 1)
        throw std::invalid_argument("heavy-hex dimensions must be positive");

    std::map<std::pair<int, int>, int> corner_id;  // (point row, point col) -> id
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> hex_edges;
    auto add_edge = [&](std::pair<int, int> a, std::pair<int, int> b) {
        corner_id.emplace(a, -1);
        corner_id.emplace(b, -1);
        hex_edges.insert({std::min(a, b), std::max(a, b)});
    };
    for (int r = 0; r < cell_rows; ++r)
        for (int c = 0; c < cell_cols; ++c) {
            int j0 = 2 * c + (r % 2);
            for (int j = j0; j < j0 + 2; ++j) {
                add_edge({r, j}, {r, j + 1});
                add_edge({r + 1, j}, {r + 1, j + 1});
            }
            add_edge({r, j0}, {r + 1, j0});
            add_edge({r, j0 + 2}, {r + 1, j0 + 2});
        }

    int next = 0;
    for (auto& [pt, id] : corner_id) id = next++;

    std::vector<std::pair<int, int>> edges;
    std::vector<std::pair<double, double>> coords(corner_id.size() + hex_edges.size());
    for (const auto& [pt, id] : corner_id)
        coords[id] = {static_cast<double>(pt.second), static_cast<double>(pt.first) * 1.5};
    for (const auto& [a, b] : hex_edges) {
        int u = corner_id.at(a);
        int v = corner_id.at(b);
        int mid = next++;
        edges.emplace_back(u, mid);
        edges.emplace_back(mid, v);
        coords[mid] = {(coords[u].first + coords[v].first) / 2.0,
                       (coords[u].second + coords[v].second) / 2.0};
    }
    CouplingGraph g(next, std::move(edges), GraphKind::HeavyHex);
    g.set_layout(std::move(coords));
    return g;
}

// Node of minimum eccentricity, ties broken by smallest index.
inline int graph_center(const CouplingGraph& g) {
    int best = 0;
    int best_ecc = -1;
    for (int u = 0; u < g.node_count(); ++u) {
        auto dist = g.bfs_distances(u);
        int ecc = *std::max_element(dist.begin(), dist.end());
        if (best_ecc < 0 || ecc < best_ecc) {
            best_ecc = ecc;
            best = u;
        }
    }
    return best;
}

struct QubitSelection {
    std::vector<int> nodes;  // in BFS visit order
    const CouplingGraph* source_graph = nullptr;

    // Nodes in ascending index order; also the circuit-local qubit layout.
    std::vector<int> sorted_nodes() const {
        std::vector<int> s = nodes;
        std::sort(s.begin(), s.end());
        return s;
    }
};

// First n nodes in BFS order from `start`; neighbors visit in ascending
// index order, so the result is deterministic and its induced subgraph
// is connected.
inline QubitSelection bfs_select(const CouplingGraph& g, int start, int n) {
    if (n < 1 || n > g.node_count())
        throw std::invalid_argument("selection size out of range");
    std::vector<char> seen(g.node_count(), 0);
    std::vector<int> order;
    std::queue<int> q;
    seen[start] = 1;
    q.push(start);
    while (!q.empty() && static_cast<int>(order.size()) < n) {
        int u = q.front();
        q.pop();
        order.push_back(u);
        for (int v : g.neighbors(u))
            if (!seen[v]) {
                seen[v] = 1;
                q.push(v);
            }
    }
    return QubitSelection{std::move(order), &g};
}

// Center of the subgraph induced by `nodes`: minimum eccentricity with
// distances measured inside the subgraph, ties to smallest node index.
inline int subgraph_center(const CouplingGraph& g, const std::vector<int>& nodes) {
    std::set<int> in(nodes.begin(), nodes.end());
    auto ecc_of = [&](int s) {
        std::map<int, int> dist;
        std::queue<int> q;
        dist[s] = 0;
        q.push(s);
        int ecc = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : g.neighbors(u)) {
                if (!in.count(v) || dist.count(v)) continue;
                dist[v] = dist[u] + 1;
                ecc = std::max(ecc, dist[v]);
                q.push(v);
            }
        }
        if (static_cast<int>(dist.size()) != static_cast<int>(nodes.size())) return -1;
        return ecc;
    };
    int best = -1, best_ecc = -1;
    std::vector<int> sorted(nodes.begin(), nodes.end());
    std::sort(sorted.begin(), sorted.end());
    for (int u : sorted) {
        int ecc = ecc_of(u);
        if (ecc < 0) throw std::invalid_argument("node set is not connected");
        if (best_ecc < 0 || ecc < best_ecc) {
            best_ecc = ecc;
            best = u;
        }
    }
    return best;
}

inline bool induced_subgraph_connected(const CouplingGraph& g, const std::vector<int>& nodes) {
    if (nodes.empty()) return false;
    std::set<int> in(nodes.begin(), nodes.end());
    std::set<int> seen;
    std::queue<int> q;
    q.push(nodes.front());
    seen.insert(nodes.front());
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : g.neighbors(u))
            if (in.count(v) && !seen.count(v)) {
                seen.insert(v);
                q.push(v);
            }
    }
    return seen.size() == in.size();
}

}  // namespace groupmv
