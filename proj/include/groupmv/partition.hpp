#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "groupmv/rng.hpp"
#include "groupmv/topology.hpp"

namespace groupmv {

namespace detail {

// Connected components of `nodes` inside g, each sorted, ordered by their
// smallest member.
inline std::vector<std::vector<int>> components_of(const CouplingGraph& g,
                                                   const std::set<int>& nodes) {
    std::vector<std::vector<int>> comps;
    std::set<int> seen;
    for (int s : nodes) {
        if (seen.count(s)) continue;
        std::vector<int> comp;
        std::queue<int> q;
        q.push(s);
        seen.insert(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            comp.push_back(u);
            for (int v : g.neighbors(u))
                if (nodes.count(v) && !seen.count(v)) {
                    seen.insert(v);
                    q.push(v);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

inline bool sets_adjacent(const CouplingGraph& g, const std::vector<int>& a,
                          const std::set<int>& b) {
    for (int u : a)
        for (int v : g.neighbors(u))
            if (b.count(v)) return true;
    return false;
}

// KL leaves the minimum cut it can find, which may fragment a side. Every
// minority component is re-attached to whichever side it touches, preferring
// the smaller side when both are adjacent so balance drifts as little as
// possible.
inline void repair_connectivity(const CouplingGraph& g, std::set<int>& a, std::set<int>& b) {
    auto comps_a = components_of(g, a);
    auto comps_b = components_of(g, b);
    if (comps_a.size() <= 1 && comps_b.size() <= 1) return;

    auto largest = [](const std::vector<std::vector<int>>& comps) {
        size_t best = 0;
        for (size_t i = 1; i < comps.size(); ++i)
            if (comps[i].size() > comps[best].size()) best = i;
        return best;
    };
    std::vector<std::vector<int>> pending;
    std::set<int> core_a, core_b;
    size_t ka = largest(comps_a), kb = largest(comps_b);
    for (size_t i = 0; i < comps_a.size(); ++i)
        if (i == ka) core_a.insert(comps_a[i].begin(), comps_a[i].end());
        else pending.push_back(comps_a[i]);
    for (size_t i = 0; i < comps_b.size(); ++i)
        if (i == kb) core_b.insert(comps_b[i].begin(), comps_b[i].end());
        else pending.push_back(comps_b[i]);
    std::sort(pending.begin(), pending.end());

    while (!pending.empty()) {
        bool progress = false;
        for (size_t i = 0; i < pending.size(); ++i) {
            bool adj_a = sets_adjacent(g, pending[i], core_a);
            bool adj_b = sets_adjacent(g, pending[i], core_b);
            if (!adj_a && !adj_b) continue;
            bool to_a = adj_a && (!adj_b || core_a.size() <= core_b.size());
            auto& dst = to_a ? core_a : core_b;
            dst.insert(pending[i].begin(), pending[i].end());
            pending.erase(pending.begin() + i);
            progress = true;
            break;
        }
        if (!progress) throw std::logic_error("connectivity repair stalled");
    }
    a = std::move(core_a);
    b = std::move(core_b);
}

}  // namespace detail

// Kernighan-Lin bisection of `nodes` (within g) from a random balanced split,
// followed by connectivity repair. Deterministic given (inputs, seed).
inline std::pair<std::vector<int>, std::vector<int>> kl_bisect(const std::vector<int>& nodes,
                                                               const CouplingGraph& g,
                                                               std::uint64_t seed) {
    const int n = static_cast<int>(nodes.size());
    if (n < 2) throw std::invalid_argument("cannot bisect fewer than two nodes");

    std::vector<int> sorted(nodes);
    std::sort(sorted.begin(), sorted.end());
    std::map<int, int> local;  // global node -> local index
    for (int i = 0; i < n; ++i) local[sorted[i]] = i;

    std::vector<std::vector<int>> adj(n);
    int max_degree = 0;
    for (int i = 0; i < n; ++i) {
        for (int v : g.neighbors(sorted[i])) {
            auto it = local.find(v);
            if (it != local.end()) adj[i].push_back(it->second);
        }
        std::sort(adj[i].begin(), adj[i].end());
        max_degree = std::max(max_degree, static_cast<int>(adj[i].size()));
    }

    // Random balanced initial split.
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng = make_rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> side(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < n; ++i) side[perm[i]] = i < half ? 0 : 1;

    std::vector<int> gain_d(n);
    auto recompute_d = [&](int v) {
        int ext = 0, internal = 0;
        for (int u : adj[v]) (side[u] == side[v] ? internal : ext)++;
        gain_d[v] = ext - internal;
    };

    const int pass_cap = 10;
    for (int pass = 0; pass < pass_cap; ++pass) {
        for (int v = 0; v < n; ++v) recompute_d(v);
        std::vector<char> locked(n, 0);
        std::vector<std::pair<int, int>> swaps;
        int cumulative = 0, best_cum = 0;
        size_t best_prefix = 0;

        const int steps = std::min(half, n - half);
        for (int step = 0; step < steps; ++step) {
            // Unlocked nodes per side, ordered by (D desc, index asc) via
            // bucketing; D is bounded by the degree.
            std::vector<std::vector<int>> bucket0(2 * max_degree + 1),
                bucket1(2 * max_degree + 1);
            for (int v = 0; v < n; ++v) {
                if (locked[v]) continue;
                auto& b = side[v] == 0 ? bucket0 : bucket1;
                b[max_degree - gain_d[v]].push_back(v);
            }
            std::vector<int> list0, list1;
            for (auto& b : bucket0) list0.insert(list0.end(), b.begin(), b.end());
            for (auto& b : bucket1) list1.insert(list1.end(), b.begin(), b.end());
            if (list0.empty() || list1.empty()) break;

            int best_gain = std::numeric_limits<int>::min();
            int best_a = -1, best_b = -1;
            for (int a : list0) {
                if (gain_d[a] + gain_d[list1.front()] <= best_gain) break;
                for (int b : list1) {
                    int ub = gain_d[a] + gain_d[b];
                    if (ub <= best_gain) break;
                    bool adjacent = std::binary_search(adj[a].begin(), adj[a].end(), b);
                    int gain = ub - (adjacent ? 2 : 0);
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_a = a;
                        best_b = b;
                    }
                }
            }
            if (best_a < 0) break;

            // Tentative swap with incremental D updates.
            auto move_node = [&](int v) {
                int from = side[v];
                side[v] = 1 - from;
                for (int u : adj[v]) {
                    if (locked[u]) continue;
                    gain_d[u] += (side[u] == from) ? 2 : -2;
                }
            };
            move_node(best_a);
            move_node(best_b);
            locked[best_a] = locked[best_b] = 1;
            swaps.emplace_back(best_a, best_b);
            cumulative += best_gain;
            if (cumulative > best_cum) {
                best_cum = cumulative;
                best_prefix = swaps.size();
            }
        }

        // Roll back everything past the best prefix.
        for (size_t i = swaps.size(); i > best_prefix; --i) {
            side[swaps[i - 1].first] ^= 1;
            side[swaps[i - 1].second] ^= 1;
        }
        if (best_cum <= 0) break;
    }

    std::set<int> a, b;
    for (int i = 0; i < n; ++i) (side[i] == 0 ? a : b).insert(sorted[i]);
    detail::repair_connectivity(g, a, b);
    std::vector<int> half_a(a.begin(), a.end()), half_b(b.begin(), b.end());
    if (half_b < half_a) std::swap(half_a, half_b);  // smallest-node half first
    return {std::move(half_a), std::move(half_b)};
}

// Alg: recursively bisect the largest group until ceil(N/k) groups, ties on
// the smallest group index.
inline std::vector<std::vector<int>> partition_groups(const QubitSelection& sel, int k,
                                                      std::uint64_t seed) {
    const int n = static_cast<int>(sel.nodes.size());
    if (k < 2) throw std::invalid_argument("group size must be at least 2");
    if (k > n) throw std::invalid_argument("group size exceeds selection");
    const CouplingGraph& g = *sel.source_graph;

    const int m = (n + k - 1) / k;
    std::vector<std::vector<int>> groups{sel.sorted_nodes()};
    int round = 0;
    while (static_cast<int>(groups.size()) < m) {
        size_t largest = 0;
        for (size_t i = 1; i < groups.size(); ++i)
            if (groups[i].size() > groups[largest].size()) largest = i;
        auto [a, b] = kl_bisect(groups[largest], g, derive_seed(seed, round++));
        groups[largest] = std::move(a);
        groups.insert(groups.begin() + largest + 1, std::move(b));
    }
    return groups;
}

using TreeEdge = std::pair<int, int>;  // (parent group, child group)
using Link = std::pair<int, int>;      // (parent-side qubit, child-side qubit)

// Partition plus fusion plan: spanning tree over groups and the redundant
// boundary links carried by each tree edge.
struct GroupPlan {
    std::vector<std::vector<int>> groups;
    int root_group = 0;
    std::vector<TreeEdge> tree_edges;  // BFS discovery order
    std::map<TreeEdge, std::vector<Link>> links;
    std::map<TreeEdge, int> l_eff;
    int l_requested = 1;

    int group_of(int node) const {
        for (size_t i = 0; i < groups.size(); ++i)
            if (std::binary_search(groups[i].begin(), groups[i].end(), node))
                return static_cast<int>(i);
        return -1;
    }

    int min_l_eff() const {
        int m = l_requested;
        for (const auto& [e, l] : l_eff) m = std::min(m, l);
        return m;
    }

    bool degraded() const { return min_l_eff() < l_requested; }

    // Tree depth of each group (root = 0).
    std::vector<int> group_depths() const {
        std::vector<int> depth(groups.size(), 0);
        for (const auto& [p, c] : tree_edges) depth[c] = depth[p] + 1;  // BFS order
        return depth;
    }

    // Path of tree edges from the root down to `group`.
    std::vector<TreeEdge> path_from_root(int group) const {
        std::map<int, TreeEdge> incoming;
        for (const auto& e : tree_edges) incoming[e.second] = e;
        std::vector<TreeEdge> path;
        int cur = group;
        while (cur != root_group) {
            auto it = incoming.find(cur);
            if (it == incoming.end()) throw std::logic_error("group not reachable from root");
            path.push_back(it->second);
            cur = it->second.first;
        }
        std::reverse(path.begin(), path.end());
        return path;
    }

    std::string to_text() const {
        std::ostringstream out;
        out << "groups " << groups.size() << "\n";
        for (size_t i = 0; i < groups.size(); ++i) {
            out << "group " << i << ":";
            for (int v : groups[i]) out << " " << v;
            out << "\n";
        }
        out << "root_group " << root_group << "\n";
        out << "l_requested " << l_requested << "\n";
        for (const auto& e : tree_edges) {
            out << "tree_edge " << e.first << " " << e.second << " l_eff "
                << l_eff.at(e) << " links";
            for (const auto& [a, b] : links.at(e)) out << " (" << a << "," << b << ")";
            out << "\n";
        }
        if (degraded()) out << "degraded true\n";
        return out.str();
    }
};

namespace detail {

// Kuhn's augmenting-path maximum matching on the boundary edges between two
// groups. Left-vertex processing order is shuffled by the seed; the result
// is deterministic for a fixed seed.
inline std::vector<Link> max_boundary_matching(const CouplingGraph& g,
                                               const std::vector<int>& parent_group,
                                               const std::vector<int>& child_group,
                                               std::uint64_t seed) {
    std::set<int> child_set(child_group.begin(), child_group.end());
    std::vector<int> left;
    std::map<int, std::vector<int>> adj;  // parent qubit -> child qubits
    for (int u : parent_group) {
        for (int v : g.neighbors(u))
            if (child_set.count(v)) adj[u].push_back(v);
        if (adj.count(u)) {
            std::sort(adj[u].begin(), adj[u].end());
            left.push_back(u);
        }
    }
    Rng rng = make_rng(seed);
    std::shuffle(left.begin(), left.end(), rng);

    std::map<int, int> match_right;  // child qubit -> parent qubit
    std::function<bool(int, std::set<int>&)> try_augment = [&](int u, std::set<int>& visited) {
        for (int v : adj[u]) {
            if (visited.count(v)) continue;
            visited.insert(v);
            auto it = match_right.find(v);
            if (it == match_right.end() || try_augment(it->second, visited)) {
                match_right[v] = u;
                return true;
            }
        }
        return false;
    };
    for (int u : left) {
        std::set<int> visited;
        try_augment(u, visited);
    }
    std::vector<Link> matching;
    for (const auto& [v, u] : match_right) matching.emplace_back(u, v);
    std::sort(matching.begin(), matching.end());
    return matching;
}

}  // namespace detail

// Builds the fusion plan: BFS spanning tree over the group-adjacency graph
// rooted at the group containing `start`, then up to l_requested
// vertex-disjoint links per tree edge, degrading to the largest odd value
// the boundary supports.
inline GroupPlan plan_links(const std::vector<std::vector<int>>& groups, const CouplingGraph& g,
                            int start, int l_requested, std::uint64_t seed) {
    if (l_requested < 1 || l_requested % 2 == 0)
        throw std::invalid_argument("requested redundancy must be odd (2 is not allowed)");

    GroupPlan plan;
    plan.groups = groups;
    for (auto& grp : plan.groups) std::sort(grp.begin(), grp.end());
    plan.l_requested = l_requested;

    const int m = static_cast<int>(groups.size());
    std::map<int, int> owner;
    for (int i = 0; i < m; ++i)
        for (int v : plan.groups[i]) owner[v] = i;

    auto it = owner.find(start);
    if (it == owner.end()) throw std::invalid_argument("start node not in any group");
    plan.root_group = it->second;
    if (m == 1) return plan;

    std::vector<std::set<int>> group_adj(m);
    for (const auto& [u, v] : g.edges()) {
        auto iu = owner.find(u), iv = owner.find(v);
        if (iu == owner.end() || iv == owner.end() || iu->second == iv->second) continue;
        group_adj[iu->second].insert(iv->second);
        group_adj[iv->second].insert(iu->second);
    }

    std::vector<char> seen(m, 0);
    std::queue<int> q;
    seen[plan.root_group] = 1;
    q.push(plan.root_group);
    int reached = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : group_adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                plan.tree_edges.emplace_back(u, v);
                q.push(v);
            }
    }
    if (reached != m)
        throw std::runtime_error("group-adjacency graph is disconnected (partitioning bug)");

    int edge_index = 0;
    for (const auto& e : plan.tree_edges) {
        auto matching = detail::max_boundary_matching(g, plan.groups[e.first],
                                                      plan.groups[e.second],
                                                      derive_seed(seed, edge_index++));
        if (matching.empty())
            throw std::runtime_error("adjacent groups with empty boundary matching");
        int take = std::min<int>(l_requested, static_cast<int>(matching.size()));
        if (take % 2 == 0) --take;  // degrade past even values: votes must never tie
        matching.resize(take);
        plan.l_eff[e] = take;
        plan.links[e] = std::move(matching);
    }
    return plan;
}

}  // namespace groupmv
