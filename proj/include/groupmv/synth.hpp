#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupmv/circuit.hpp"
#include "groupmv/partition.hpp"
#include "groupmv/rng.hpp"
#include "groupmv/topology.hpp"

namespace groupmv {

enum class Method { Unitary, LineDynamic, GroupMV };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::Unitary: return "unitary";
        case Method::LineDynamic: return "line_dynamic";
        default: return "group_mv";
    }
}

struct SynthRequest {
    const CouplingGraph* graph = nullptr;
    int n = 0;
    int k = 2;
    int l = 1;
    Method method = Method::GroupMV;
    int restarts = 1;
    std::uint64_t seed = 0;

    void check() const {
        if (!graph) throw std::invalid_argument("missing coupling graph");
        if (n < 1 || n > graph->node_count())
            throw std::invalid_argument("qubit count out of range");
        if (l < 1 || l % 2 == 0) throw std::invalid_argument("redundancy must be odd");
        if (restarts < 1) throw std::invalid_argument("need at least one restart");
    }
};

namespace detail {

// Greedy "infection" CNOT schedule: per layer, every entangled qubit may
// recruit its lowest-index un-entangled neighbor; first-come claims win in
// ascending control order. On an all-to-all graph this doubles the entangled
// set each layer.
inline std::vector<Operation> ghz_tree_ops(const CouplingGraph& g,
                                           const std::vector<int>& nodes, int root) {
    std::set<int> in(nodes.begin(), nodes.end());
    if (!in.count(root)) throw std::invalid_argument("root not in node set");
    std::vector<Operation> ops{Operation::h(root)};
    std::set<int> entangled{root};
    while (entangled.size() < in.size()) {
        std::set<int> claimed;
        std::vector<Operation> layer;
        for (int u : entangled) {
            for (int v : g.neighbors(u)) {
                if (!in.count(v) || entangled.count(v) || claimed.count(v)) continue;
                layer.push_back(Operation::cx(u, v));
                claimed.insert(v);
                break;
            }
        }
        if (layer.empty()) throw std::invalid_argument("node set is not connected");
        for (auto& op : layer) ops.push_back(op);
        entangled.insert(claimed.begin(), claimed.end());
    }
    return ops;
}

// Remap a global-indexed op list onto circuit-local qubits 0..N-1 in
// ascending global order; the layout is recorded in circuit metadata.
inline DynamicCircuit compact_circuit(const std::vector<Operation>& ops,
                                      const std::vector<int>& sorted_selection,
                                      int num_clbits) {
    std::map<int, int> local;
    for (size_t i = 0; i < sorted_selection.size(); ++i)
        local[sorted_selection[i]] = static_cast<int>(i);
    DynamicCircuit c;
    c.num_qubits = static_cast<int>(sorted_selection.size());
    c.num_clbits = num_clbits;
    for (const auto& op : ops) {
        Operation mapped = op;
        if (op.q0 >= 0) mapped.q0 = local.at(op.q0);
        if (op.q1 >= 0) mapped.q1 = local.at(op.q1);
        c.append(std::move(mapped));
    }
    std::ostringstream layout;
    for (size_t i = 0; i < sorted_selection.size(); ++i) {
        if (i) layout << " ";
        layout << sorted_selection[i];
    }
    c.metadata["layout"] = layout.str();
    return c;
}

// Fusion synthesis shared by Group-MV and Line Dynamic. Ops are emitted on
// global qubit ids and compacted at the end.
//
// Phase order matters in two places. Boundary CNOTs run deepest-edge-first
// so a qubit that is both the measured side of its group's incoming edge and
// the control side of an outgoing edge fires its control role before being
// contaminated. Re-entangling CNOTs run shallowest-first so a restored qubit
// is valid before it re-entangles a deeper partner.
inline DynamicCircuit synth_fusion(const CouplingGraph& g, const GroupPlan& plan) {
    std::vector<Operation> ops;

    // Parallel local GHZ trees, each rooted at the group's internal center.
    for (const auto& grp : plan.groups) {
        int root = grp.size() == 1 ? grp.front() : subgraph_center(g, grp);
        auto tree = ghz_tree_ops(g, grp, root);
        ops.insert(ops.end(), tree.begin(), tree.end());
    }

    auto depths = plan.group_depths();
    std::vector<TreeEdge> by_depth_desc = plan.tree_edges;
    std::stable_sort(by_depth_desc.begin(), by_depth_desc.end(),
                     [&](const TreeEdge& a, const TreeEdge& b) {
                         return depths[a.second] > depths[b.second];
                     });
    for (const auto& e : by_depth_desc)
        for (const auto& [pq, cq] : plan.links.at(e)) ops.push_back(Operation::cx(pq, cq));

    // Mid-circuit measurement of every child-side link qubit.
    int num_clbits = 0;
    std::map<TreeEdge, std::vector<int>> edge_clbits;
    std::set<int> measured;
    for (const auto& e : plan.tree_edges)
        for (const auto& [pq, cq] : plan.links.at(e)) {
            ops.push_back(Operation::measure(cq, num_clbits));
            edge_clbits[e].push_back(num_clbits++);
            measured.insert(cq);
        }

    // Correction per non-root group: XOR of the per-edge votes along the
    // tree path from the root, applied to every non-measured qubit.
    for (size_t gi = 0; gi < plan.groups.size(); ++gi) {
        if (static_cast<int>(gi) == plan.root_group) continue;
        std::optional<ClassicalExpr> expr;
        for (const auto& e : plan.path_from_root(static_cast<int>(gi))) {
            const auto& clbits = edge_clbits.at(e);
            ClassicalExpr vote = clbits.size() == 1
                                     ? ClassicalExpr::bit(clbits.front())
                                     : ClassicalExpr::majority([&] {
                                           std::vector<ClassicalExpr> args;
                                           for (int b : clbits) args.push_back(ClassicalExpr::bit(b));
                                           return args;
                                       }());
            expr = expr ? ClassicalExpr::xor_of(*expr, vote) : vote;
        }
        for (int qubit : plan.groups[gi])
            if (!measured.count(qubit)) ops.push_back(Operation::cond_x(qubit, *expr));
    }

    // Reset measured qubits, then re-entangle each from its partner.
    for (const auto& e : plan.tree_edges)
        for (const auto& [pq, cq] : plan.links.at(e)) ops.push_back(Operation::reset(cq));
    std::vector<TreeEdge> by_depth_asc = plan.tree_edges;
    std::stable_sort(by_depth_asc.begin(), by_depth_asc.end(),
                     [&](const TreeEdge& a, const TreeEdge& b) {
                         return depths[a.second] < depths[b.second];
                     });
    for (const auto& e : by_depth_asc)
        for (const auto& [pq, cq] : plan.links.at(e)) ops.push_back(Operation::cx(pq, cq));

    std::vector<int> all_nodes;
    for (const auto& grp : plan.groups) all_nodes.insert(all_nodes.end(), grp.begin(), grp.end());
    std::sort(all_nodes.begin(), all_nodes.end());
    return compact_circuit(ops, all_nodes, num_clbits);
}

// Simple-path search: a path of `target_len` nodes inside the subgraph
// induced by `nodes`, via randomized DFS with a fewest-onward-moves
// heuristic and a per-trial expansion budget. target_len == |nodes| asks for
// a Hamiltonian path.
inline std::optional<std::vector<int>> find_simple_path(const CouplingGraph& g,
                                                        const std::vector<int>& nodes,
                                                        int target_len, std::uint64_t seed,
                                                        int trials) {
    const int n = static_cast<int>(nodes.size());
    if (target_len < 1 || target_len > n) return std::nullopt;
    if (target_len == 1) return std::vector<int>{*std::min_element(nodes.begin(), nodes.end())};
    std::set<int> in(nodes.begin(), nodes.end());

    // Full-grid selections have a closed-form serpentine path.
    if (g.kind() == GraphKind::Grid && n == g.node_count()) {
        int cols = g.degree(0) == 2 ? g.neighbors(0)[1] : n;
        int rows = n / cols;
        std::vector<int> path;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                path.push_back(r * cols + (r % 2 ? cols - 1 - c : c));
        path.resize(target_len);
        return path;
    }

    std::vector<int> sorted(nodes);
    std::sort(sorted.begin(), sorted.end());
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = make_rng(derive_seed(seed, trial));
        int start = sorted[uniform_int(rng, n)];
        std::vector<int> path{start};
        std::set<int> used{start};
        long budget = 200000;
        std::function<bool()> extend = [&]() -> bool {
            if (static_cast<int>(path.size()) == target_len) return true;
            if (--budget < 0) return false;
            int u = path.back();
            std::vector<std::pair<int, int>> cands;  // (onward degree, node)
            for (int v : g.neighbors(u)) {
                if (!in.count(v) || used.count(v)) continue;
                int onward = 0;
                for (int w : g.neighbors(v))
                    if (in.count(w) && !used.count(w)) ++onward;
                cands.emplace_back(onward, v);
            }
            std::shuffle(cands.begin(), cands.end(), rng);
            std::stable_sort(cands.begin(), cands.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& [deg, v] : cands) {
                path.push_back(v);
                used.insert(v);
                if (extend()) return true;
                used.erase(v);
                path.pop_back();
            }
            return false;
        };
        if (extend()) return path;
    }
    return std::nullopt;
}

// Chain plan over consecutive path pairs (final group is a triple when N is
// odd), one link per junction.
inline GroupPlan chain_plan(const std::vector<int>& path) {
    const int n = static_cast<int>(path.size());
    GroupPlan plan;
    plan.l_requested = 1;
    plan.root_group = 0;
    std::vector<std::vector<int>> groups;
    for (int i = 0; i + 1 < n; i += 2) {
        if (n % 2 == 1 && i == n - 3) {
            groups.push_back({path[i], path[i + 1], path[i + 2]});
            break;
        }
        groups.push_back({path[i], path[i + 1]});
    }
    if (n == 1) groups.push_back({path[0]});
    for (size_t j = 0; j + 1 < groups.size(); ++j) {
        TreeEdge e{static_cast<int>(j), static_cast<int>(j + 1)};
        plan.tree_edges.push_back(e);
        plan.links[e] = {{groups[j].back(), groups[j + 1].front()}};
        plan.l_eff[e] = 1;
    }
    plan.groups = std::move(groups);
    for (auto& grp : plan.groups) std::sort(grp.begin(), grp.end());
    return plan;
}

}  // namespace detail

// Local GHZ preparation over a connected node set (global indices kept).
inline std::vector<Operation> synth_ghz_tree(const CouplingGraph& g,
                                             const std::vector<int>& nodes, int root) {
    return detail::ghz_tree_ops(g, nodes, root);
}

inline DynamicCircuit synth_unitary(const CouplingGraph& g, const QubitSelection& sel,
                                    int root) {
    auto sorted = sel.sorted_nodes();
    auto c = detail::compact_circuit(detail::ghz_tree_ops(g, sorted, root), sorted, 0);
    c.metadata["method"] = to_string(Method::Unitary);
    return c;
}

namespace detail {

inline DynamicCircuit line_dynamic_from_path(const CouplingGraph& g,
                                             const std::vector<int>& path) {
    auto plan = chain_plan(path);
    auto c = synth_fusion(g, plan);
    c.metadata["method"] = to_string(Method::LineDynamic);
    c.metadata["junctions"] = std::to_string(plan.tree_edges.size());
    return c;
}

}  // namespace detail

// Requires a Hamiltonian path on the induced subgraph of the selection.
inline DynamicCircuit synth_line_dynamic(const CouplingGraph& g, const QubitSelection& sel,
                                         std::uint64_t seed) {
    auto sorted = sel.sorted_nodes();
    auto path = detail::find_simple_path(g, sorted, static_cast<int>(sorted.size()), seed, 64);
    if (!path) throw std::runtime_error("linear embedding unavailable");
    return detail::line_dynamic_from_path(g, *path);
}

inline DynamicCircuit synth_group_mv(const CouplingGraph& g, const QubitSelection& sel,
                                     const GroupPlan& plan) {
    std::vector<int> covered;
    for (const auto& grp : plan.groups) covered.insert(covered.end(), grp.begin(), grp.end());
    std::sort(covered.begin(), covered.end());
    if (covered != sel.sorted_nodes())
        throw std::invalid_argument("plan does not cover the qubit selection");
    auto c = detail::synth_fusion(g, plan);
    c.metadata["method"] = to_string(Method::GroupMV);
    c.metadata["groups"] = std::to_string(plan.groups.size());
    c.metadata["min_l_eff"] = std::to_string(plan.min_l_eff());
    if (plan.degraded()) c.metadata["degraded"] = "true";
    return c;
}

struct RestartStats {
    std::vector<DepthInfo> depths;
    std::vector<int> min_l_effs;
    int chosen = -1;
    bool degraded = false;
};

struct SynthResult {
    DynamicCircuit circuit;
    GroupPlan plan;
    RestartStats stats;
};

// Runs `restarts` independent pipelines with derived seeds and keeps the
// minimum-depth candidate whose every boundary meets the requested
// redundancy; when no candidate does, the best degraded one is returned and
// flagged.
inline SynthResult randomized_search(const SynthRequest& req) {
    req.check();
    const CouplingGraph& g = *req.graph;
    const int center = graph_center(g);

    struct Candidate {
        DynamicCircuit circuit;
        GroupPlan plan;
        DepthInfo depth;
        bool meets_l = false;
    };
    std::vector<Candidate> candidates;
    RestartStats stats;
    std::string last_error;

    for (int r = 0; r < req.restarts; ++r) {
        std::uint64_t seed_r = derive_seed(req.seed, r);
        try {
            Candidate cand;
            switch (req.method) {
                case Method::Unitary: {
                    auto sel = bfs_select(g, center, req.n);
                    auto sorted = sel.sorted_nodes();
                    cand.circuit = synth_unitary(g, sel, subgraph_center(g, sorted));
                    cand.plan.groups = {sorted};
                    cand.plan.l_requested = req.l;
                    break;
                }
                case Method::LineDynamic: {
                    // The line protocol selects its own qubits: an N-node
                    // simple path on the device rather than the BFS ball.
                    std::vector<int> all(g.node_count());
                    std::iota(all.begin(), all.end(), 0);
                    auto path = detail::find_simple_path(g, all, req.n, seed_r, 64);
                    if (!path) throw std::runtime_error("linear embedding unavailable");
                    cand.plan = detail::chain_plan(*path);
                    cand.plan.l_requested = req.l;
                    cand.circuit = detail::line_dynamic_from_path(g, *path);
                    break;
                }
                case Method::GroupMV: {
                    auto sel = bfs_select(g, center, req.n);
                    if (req.k < 2 || req.k > req.n)
                        throw std::invalid_argument("group size out of range");
                    auto groups = partition_groups(sel, req.k, derive_seed(seed_r, 1));
                    cand.plan = plan_links(groups, g, center, req.l, derive_seed(seed_r, 2));
                    cand.circuit = synth_group_mv(g, sel, cand.plan);
                    break;
                }
            }
            cand.depth = cand.circuit.depth();
            cand.meets_l = cand.plan.min_l_eff() >= req.l;
            stats.depths.push_back(cand.depth);
            stats.min_l_effs.push_back(cand.plan.min_l_eff());
            candidates.push_back(std::move(cand));
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    if (candidates.empty())
        throw std::runtime_error("all restarts failed: " + last_error);

    int best = -1;
    bool any_meets = std::any_of(candidates.begin(), candidates.end(),
                                 [](const Candidate& c) { return c.meets_l; });
    for (size_t i = 0; i < candidates.size(); ++i) {
        if (any_meets && !candidates[i].meets_l) continue;
        if (best < 0 || candidates[i].depth.better_than(candidates[best].depth))
            best = static_cast<int>(i);
    }
    stats.chosen = best;
    stats.degraded = !any_meets;
    const bool degraded = stats.degraded;

    SynthResult result{std::move(candidates[best].circuit), std::move(candidates[best].plan),
                       std::move(stats)};
    result.circuit.metadata["seed"] = std::to_string(req.seed);
    result.circuit.metadata["restarts"] = std::to_string(req.restarts);
    if (degraded) result.circuit.metadata["degraded"] = "true";
    return result;
}

}  // namespace groupmv
