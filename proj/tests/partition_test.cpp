#include "groupmv/partition.hpp"

#include <gtest/gtest.h>

#include <set>

#include "groupmv/topology.hpp"

using namespace groupmv;

namespace {

// Brute-force verification helpers, independent of the library internals.
bool connected(const CouplingGraph& g, const std::vector<int>& nodes) {
    return induced_subgraph_connected(g, nodes);
}

int cut_size(const CouplingGraph& g, const std::vector<int>& a, const std::vector<int>& b) {
    std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    int cut = 0;
    for (const auto& [u, v] : g.edges())
        if ((sa.count(u) && sb.count(v)) || (sa.count(v) && sb.count(u))) ++cut;
    return cut;
}

void verify_plan(const CouplingGraph& g, const GroupPlan& plan, int n, int k) {
    std::set<int> all;
    size_t total = 0;
    for (const auto& grp : plan.groups) {
        EXPECT_TRUE(connected(g, grp));
        all.insert(grp.begin(), grp.end());
        total += grp.size();
    }
    EXPECT_EQ(all.size(), total);  // disjoint
    EXPECT_EQ(static_cast<int>(total), n);
    EXPECT_EQ(static_cast<int>(plan.groups.size()), (n + k - 1) / k);
    EXPECT_EQ(plan.tree_edges.size(), plan.groups.size() - 1);

    for (const auto& e : plan.tree_edges) {
        const auto& links = plan.links.at(e);
        EXPECT_EQ(plan.l_eff.at(e), static_cast<int>(links.size()));
        EXPECT_EQ(plan.l_eff.at(e) % 2, 1);
        EXPECT_LE(plan.l_eff.at(e), plan.l_requested);
        std::set<int> used;
        for (const auto& [a, b] : links) {
            EXPECT_TRUE(g.has_edge(a, b));
            EXPECT_TRUE(std::binary_search(plan.groups[e.first].begin(),
                                           plan.groups[e.first].end(), a));
            EXPECT_TRUE(std::binary_search(plan.groups[e.second].begin(),
                                           plan.groups[e.second].end(), b));
            EXPECT_TRUE(used.insert(a).second);  // vertex-disjoint within an edge
            EXPECT_TRUE(used.insert(b).second);
        }
    }
}

}  // namespace

TEST(KlBisect, TwoNodes) {
    auto g = make_grid(1, 2);
    auto [a, b] = kl_bisect({0, 1}, g, 1);
    EXPECT_EQ(a, (std::vector<int>{0}));
    EXPECT_EQ(b, (std::vector<int>{1}));
}

TEST(KlBisect, PathOfFourFindsUnitCut) {
    // Exhaustive check: {0,1}/{2,3} is the unique balanced bisection of a
    // 4-path with cut 1, so KL must land there from any seed.
    auto g = make_grid(1, 4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto [a, b] = kl_bisect({0, 1, 2, 3}, g, seed);
        EXPECT_EQ(cut_size(g, a, b), 1) << "seed " << seed;
        EXPECT_TRUE(connected(g, a));
        EXPECT_TRUE(connected(g, b));
    }
}

TEST(KlBisect, RingBisectionIsTwoArcs) {
    // Any bisection of a ring into two connected halves has exactly 2 cut
    // edges.
    auto g = make_ring(40);
    std::vector<int> nodes(40);
    std::iota(nodes.begin(), nodes.end(), 0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto [a, b] = kl_bisect(nodes, g, seed);
        EXPECT_TRUE(connected(g, a));
        EXPECT_TRUE(connected(g, b));
        EXPECT_EQ(cut_size(g, a, b), 2) << "seed " << seed;
    }
}

TEST(KlBisect, RejectsSingleton) {
    auto g = make_ring(3);
    EXPECT_THROW(kl_bisect({0}, g, 0), std::invalid_argument);
}

TEST(KlBisect, DeterministicGivenSeed) {
    auto g = make_grid(4, 5);
    std::vector<int> nodes(20);
    std::iota(nodes.begin(), nodes.end(), 0);
    auto r1 = kl_bisect(nodes, g, 77);
    auto r2 = kl_bisect(nodes, g, 77);
    EXPECT_EQ(r1, r2);
}

TEST(PartitionGroups, FortyGridIntoTwoTwenties) {
    auto g = make_grid(5, 8);
    auto sel = bfs_select(g, graph_center(g), 40);
    auto groups = partition_groups(sel, 20, 3);
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[0].size(), 20u);
    EXPECT_EQ(groups[1].size(), 20u);
    EXPECT_TRUE(connected(g, groups[0]));
    EXPECT_TRUE(connected(g, groups[1]));
}

TEST(PartitionGroups, ThirtyIntoTwoFifteens) {
    auto g = make_grid(5, 6);
    auto sel = bfs_select(g, graph_center(g), 30);
    auto groups = partition_groups(sel, 20, 9);
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[0].size(), 15u);
    EXPECT_EQ(groups[1].size(), 15u);
    EXPECT_TRUE(connected(g, groups[0]));
    EXPECT_TRUE(connected(g, groups[1]));
}

TEST(PartitionGroups, SingleGroupWhenKEqualsN) {
    auto g = make_ring(12);
    auto sel = bfs_select(g, 0, 12);
    auto groups = partition_groups(sel, 12, 1);
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups[0].size(), 12u);
}

TEST(PartitionGroups, RejectsBadK) {
    auto g = make_ring(10);
    auto sel = bfs_select(g, 0, 10);
    EXPECT_THROW(partition_groups(sel, 1, 0), std::invalid_argument);
    EXPECT_THROW(partition_groups(sel, 11, 0), std::invalid_argument);
}

TEST(PlanLinks, GridHalvesSupportTripleRedundancy) {
    // Hand-built split of a 4x10 grid into left and right halves: the
    // boundary has 4 parallel edges, so a matching of size >= 3 exists.
    auto g = make_grid(4, 10);
    std::vector<int> left, right;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 10; ++c) (c < 5 ? left : right).push_back(r * 10 + c);
    auto plan = plan_links({left, right}, g, 0, 3, 5);
    ASSERT_EQ(plan.tree_edges.size(), 1u);
    EXPECT_EQ(plan.l_eff.begin()->second, 3);
    EXPECT_FALSE(plan.degraded());
    verify_plan(g, plan, 40, 20);
}

TEST(PlanLinks, RingDegradesToOne) {
    auto g = make_ring(40);
    std::vector<int> arc1, arc2;
    for (int i = 0; i < 20; ++i) arc1.push_back(i);
    for (int i = 20; i < 40; ++i) arc2.push_back(i);
    auto plan = plan_links({arc1, arc2}, g, 0, 3, 5);
    ASSERT_EQ(plan.tree_edges.size(), 1u);
    EXPECT_EQ(plan.min_l_eff(), 1);  // matching size 2 -> largest odd is 1
    EXPECT_TRUE(plan.degraded());
}

TEST(PlanLinks, SingleGroupHasEmptyTree) {
    auto g = make_ring(6);
    std::vector<int> all{0, 1, 2, 3, 4, 5};
    auto plan = plan_links({all}, g, 0, 3, 0);
    EXPECT_TRUE(plan.tree_edges.empty());
    EXPECT_TRUE(plan.links.empty());
    EXPECT_FALSE(plan.degraded());
}

TEST(PlanLinks, RejectsEvenRedundancy) {
    auto g = make_ring(6);
    EXPECT_THROW(plan_links({{0, 1, 2}, {3, 4, 5}}, g, 0, 2, 0), std::invalid_argument);
}

TEST(PlanLinks, DetectsDisconnectedGrouping) {
    // Two groups with no boundary edge between them: {0,1} and {3,4} on a
    // 6-ring leave nodes 2 and 5 out, so the groups never touch.
    auto g = make_ring(6);
    EXPECT_THROW(plan_links({{0, 1}, {3, 4}}, g, 0, 1, 0), std::runtime_error);
}

TEST(PlanLinks, DeterministicGivenSeed) {
    auto g = make_grid(4, 10);
    auto sel = bfs_select(g, graph_center(g), 40);
    auto groups = partition_groups(sel, 10, 21);
    auto p1 = plan_links(groups, g, graph_center(g), 3, 42);
    auto p2 = plan_links(groups, g, graph_center(g), 3, 42);
    EXPECT_EQ(p1.to_text(), p2.to_text());
}

TEST(PlanLinks, TextDumpListsEveryEdge) {
    auto g = make_grid(4, 10);
    std::vector<int> left, right;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 10; ++c) (c < 5 ? left : right).push_back(r * 10 + c);
    auto plan = plan_links({left, right}, g, 0, 3, 5);
    auto text = plan.to_text();
    EXPECT_NE(text.find("groups 2"), std::string::npos);
    EXPECT_NE(text.find("tree_edge 0 1 l_eff 3 links"), std::string::npos);
}

// Property test: the full pipeline keeps every GroupPlan invariant on random
// topologies, sizes and seeds.
TEST(PlanInvariants, RandomizedPipeline) {
    Rng rng = make_rng(2026);
    for (int trial = 0; trial < 40; ++trial) {
        CouplingGraph g;
        switch (trial % 3) {
            case 0: g = make_grid(2 + uniform_int(rng, 5), 2 + uniform_int(rng, 6)); break;
            case 1: g = make_ring(5 + uniform_int(rng, 40)); break;
            default:
                g = make_heavy_hex(1 + uniform_int(rng, 2), 1 + uniform_int(rng, 3));
                break;
        }
        int n = 4 + uniform_int(rng, g.node_count() - 3);
        int k = 2 + uniform_int(rng, n - 1);
        int l = 1 + 2 * uniform_int(rng, 3);
        std::uint64_t seed = rng();
        int center = graph_center(g);
        auto sel = bfs_select(g, center, n);
        auto groups = partition_groups(sel, k, seed);
        auto plan = plan_links(groups, g, center, l, derive_seed(seed, 1));
        verify_plan(g, plan, n, k);
    }
}
