#include "groupmv/topology.hpp"

#include <gtest/gtest.h>

#include "groupmv/rng.hpp"

using namespace groupmv;

TEST(Grid, SmallCases) {
    auto g = make_grid(2, 2);
    EXPECT_EQ(g.node_count(), 4);
    EXPECT_EQ(g.edges().size(), 4u);

    auto path = make_grid(1, 5);
    EXPECT_EQ(path.node_count(), 5);
    EXPECT_EQ(path.edges().size(), 4u);
}

TEST(Grid, EdgeCountFormula) {
    // rows*(cols-1) + cols*(rows-1)
    auto g = make_grid(5, 8);
    EXPECT_EQ(g.node_count(), 40);
    EXPECT_EQ(g.edges().size(), 67u);
    for (int u = 0; u < g.node_count(); ++u) EXPECT_LE(g.degree(u), 4);
}

TEST(Grid, RejectsTooSmall) {
    EXPECT_THROW(make_grid(1, 1), std::invalid_argument);
    EXPECT_THROW(make_grid(0, 3), std::invalid_argument);
}

TEST(Ring, Basics) {
    auto g = make_ring(5);
    EXPECT_EQ(g.edges().size(), 5u);
    for (int u = 0; u < 5; ++u) EXPECT_EQ(g.degree(u), 2);

    EXPECT_EQ(make_ring(3).edges().size(), 3u);
    EXPECT_EQ(make_ring(40).edges().size(), 40u);
    EXPECT_THROW(make_ring(2), std::invalid_argument);
}

TEST(HeavyHex, SingleCell) {
    auto g = make_heavy_hex(1, 1);
    EXPECT_EQ(g.node_count(), 12);  // 6 corner + 6 edge qubits
    EXPECT_EQ(g.edges().size(), 12u);
    for (int u = 0; u < g.node_count(); ++u) EXPECT_EQ(g.degree(u), 2);  // a 12-cycle
}

TEST(HeavyHex, DegreeBoundAndConnectivity) {
    for (auto [r, c] : {std::pair{1, 2}, {2, 2}, {3, 4}, {5, 5}}) {
        auto g = make_heavy_hex(r, c);
        for (int u = 0; u < g.node_count(); ++u) EXPECT_LE(g.degree(u), 3);
        auto dist = g.bfs_distances(0);
        for (int d : dist) EXPECT_GE(d, 0);
    }
}

TEST(HeavyHex, ThousandNodeInstance) {
    auto g = make_heavy_hex(15, 15);
    EXPECT_GE(g.node_count(), 1000);
    for (int u = 0; u < g.node_count(); ++u) EXPECT_LE(g.degree(u), 3);
}

TEST(GraphCenter, KnownCases) {
    EXPECT_EQ(graph_center(make_ring(5)), 0);      // tie-break to smallest index
    EXPECT_EQ(graph_center(make_grid(3, 3)), 4);   // geometric middle
    EXPECT_EQ(graph_center(make_grid(1, 5)), 2);   // middle of a path
}

TEST(GraphCenter, Deterministic) {
    auto g = make_heavy_hex(2, 3);
    EXPECT_EQ(graph_center(g), graph_center(g));
}

TEST(BfsSelect, RingFrontierOrder) {
    auto g = make_ring(6);
    auto sel = bfs_select(g, 0, 3);
    EXPECT_EQ(sel.nodes, (std::vector<int>{0, 1, 5}));
}

TEST(BfsSelect, WholeGraph) {
    auto g = make_heavy_hex(1, 2);
    auto sel = bfs_select(g, graph_center(g), g.node_count());
    EXPECT_EQ(static_cast<int>(sel.nodes.size()), g.node_count());
}

TEST(BfsSelect, FullGridSelection) {
    auto g = make_grid(5, 8);
    auto sel = bfs_select(g, graph_center(g), 40);
    EXPECT_EQ(sel.nodes.size(), 40u);
    EXPECT_TRUE(induced_subgraph_connected(g, sel.nodes));
}

TEST(BfsSelect, RejectsOversize) {
    auto g = make_ring(5);
    EXPECT_THROW(bfs_select(g, 0, 6), std::invalid_argument);
}

// Property: any BFS selection induces a connected subgraph.
TEST(BfsSelect, ConnectedOnRandomInputs) {
    Rng rng = make_rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
        CouplingGraph g;
        switch (trial % 3) {
            case 0: g = make_grid(1 + uniform_int(rng, 6), 2 + uniform_int(rng, 5)); break;
            case 1: g = make_ring(3 + uniform_int(rng, 30)); break;
            default:
                g = make_heavy_hex(1 + uniform_int(rng, 3), 1 + uniform_int(rng, 3));
                break;
        }
        int start = uniform_int(rng, g.node_count());
        int n = 1 + uniform_int(rng, g.node_count());
        auto sel = bfs_select(g, start, n);
        EXPECT_EQ(static_cast<int>(sel.nodes.size()), n);
        EXPECT_TRUE(induced_subgraph_connected(g, sel.nodes));
    }
}

TEST(EdgeListDump, Format) {
    auto g = make_ring(3);
    EXPECT_EQ(g.dump_edge_list(), "nodes 3\n0 1\n0 2\n1 2\n");
}

TEST(SubgraphCenter, PathSubset) {
    auto g = make_grid(1, 5);
    std::vector<int> nodes{0, 1, 2};
    EXPECT_EQ(subgraph_center(g, nodes), 1);
}
