#include "mqne/block_graph.hpp"

#include "mqne/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <map>

using namespace mqne;

namespace {

BlockLibrary full_library(int k) {
    LibrarySpec s;
    s.k = k;
    return enumerate_library(s);
}

} // namespace

TEST_CASE("connection rule on hand-checked pairs") {
    // a block can never follow itself
    const GateBlock self = make_block(4, {Gate::rot(1), Gate::crx(2, 3)});
    CHECK_FALSE(allowed_successor(self, self));

    // rule (a): a rotation on an untouched qubit could run in parallel
    const GateBlock r12 = make_block(4, {Gate::rot(1), Gate::rot(2)});
    CHECK_FALSE(allowed_successor(r12, make_block(4, {Gate::rot(3)})));
    CHECK_FALSE(allowed_successor(
        r12, make_block(4, {Gate::crx(1, 2), Gate::rot(3)})));
    CHECK(allowed_successor(r12, make_block(4, {Gate::crx(1, 2)})));

    // full overlap, no duplicates
    const GateBlock c12 = make_block(2, {Gate::crx(1, 2)});
    CHECK(allowed_successor(c12, make_block(2, {Gate::rot(1), Gate::rot(2)})));

    // reversed CRx orientation is a different gate
    CHECK(allowed_successor(c12, make_block(2, {Gate::crx(2, 1)})));

    CHECK_THROWS_AS(allowed_successor(c12, r12), DimensionError);
}

TEST_CASE("rule (a) is exactly the circuit-merge condition") {
    // If a gate of y is disjoint from x, the two-layer circuit equals one
    // merged layer; verify at the unitary level on a random state.
    const int k = 4;
    const GateBlock x = make_block(k, {Gate::rot(1), Gate::rot(2)});
    const GateBlock y = make_block(k, {Gate::rot(3)});
    const GateBlock merged = make_block(k, {Gate::rot(1), Gate::rot(2), Gate::rot(3)});

    RngStream rng(7);
    const StateVector in = testutil::random_state(k, rng);
    const AngleVector angles = testutil::random_angles(9, rng);

    const ParamCircuit two = compile_blocks(k, {x, y});
    const ParamCircuit one = compile_blocks(k, {merged});
    // Same angles, reordered to the merged block's gate order (identical here).
    const StateVector via_two = apply_circuit(two, angles, in);
    const StateVector via_one = apply_circuit(one, angles, in);
    for (std::size_t i = 0; i < via_two.amps.size(); ++i) {
        CHECK(std::abs(via_two.amps[i] - via_one.amps[i]) < 1e-12);
    }
}

TEST_CASE("two-qubit graph matches the hand-derived adjacency matrix") {
    const BlockGraph g = build_graph(full_library(2));
    CHECK(g.node_count() == 5);
    CHECK_FALSE(g.active(0)); // empty block excluded

    // nodes: 1={R2} 2={R1} 3={R1,R2} 4=CRx(1->2) 5=CRx(2->1)
    const std::map<std::uint32_t, std::vector<std::uint32_t>> expected = {
        {1, {4, 5}}, {2, {4, 5}}, {3, {4, 5}}, {4, {1, 2, 3, 5}}, {5, {1, 2, 3, 4}},
    };
    for (const auto &[node, succ] : expected) {
        CHECK(g.successors(node) == succ);
        CHECK(g.out_degree(node) == succ.size());
    }
    CHECK(g.edge_count() == 14);
    CHECK(g.edge(3, 4));
    CHECK_FALSE(g.edge(2, 1)); // {R1} -> {R2} could run in parallel
}

TEST_CASE("adjacency equals the independent rule oracle for k <= 4") {
    for (int k = 2; k <= 4; ++k) {
        const BlockLibrary lib = full_library(k);
        const BlockGraph g = build_graph(lib);
        for (std::uint32_t x = 0; x < lib.size(); ++x) {
            for (std::uint32_t y = 0; y < lib.size(); ++y) {
                if (!g.active(x) || !g.active(y) || x == y) {
                    CHECK_FALSE(g.edge(x, y));
                    continue;
                }
                const bool expected = testutil::oracle_allowed(lib.block(x),
                                                               lib.block(y));
                CHECK(g.edge(x, y) == expected);
                CHECK(allowed_successor(lib.block(x), lib.block(y)) == expected);
            }
        }
    }
}

TEST_CASE("no self-loops and positive out-degree on active nodes") {
    for (int k : {2, 3, 4, 5, 6, 7}) {
        const BlockGraph g = build_graph(full_library(k));
        for (std::uint32_t n : g.active_nodes()) {
            CHECK_FALSE(g.edge(n, n));
            CHECK(g.out_degree(n) >= 1);
        }
    }
}

TEST_CASE("graph construction is row-parallel deterministic") {
    const BlockLibrary lib = full_library(5);
    const BlockGraph serial = build_graph(lib, true, kDefaultMaxGraphNodes, 1);
    const BlockGraph parallel = build_graph(lib, true, kDefaultMaxGraphNodes, 4);
    CHECK(serial.edge_count() == parallel.edge_count());
    for (std::uint32_t x = 0; x < lib.size(); ++x) {
        for (std::uint32_t y = 0; y < lib.size(); ++y) {
            CHECK(serial.edge(x, y) == parallel.edge(x, y));
        }
    }
}

TEST_CASE("node budget is enforced") {
    CHECK_THROWS_AS(build_graph(full_library(7), true, 100), ResourceLimitError);
}

TEST_CASE("random paths respect the policy and the rules") {
    const BlockGraph g = build_graph(full_library(2));
    RngStream rng(11);

    const Path single = random_path(g, 1, StartPolicy::fixed(4), rng);
    CHECK(single.nodes == std::vector<std::uint32_t>{4});

    const Path p = random_path(g, 3, StartPolicy::fixed(3), rng);
    CHECK(p.nodes.size() == 3);
    CHECK(p.nodes[0] == 3);
    CHECK(validate_path(g, p));

    // fixed start must be an active node
    CHECK_THROWS_AS(random_path(g, 2, StartPolicy::fixed(0), rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(random_path(g, 0, StartPolicy::fixed(3), rng),
                    std::invalid_argument);

    const StartPolicy all_rot = StartPolicy::all_rotations(g.library());
    CHECK(all_rot.block == 3);
}

TEST_CASE("ten thousand sampled and extended paths contain no violations") {
    const BlockGraph g = build_graph(full_library(7));
    const StartPolicy start = StartPolicy::all_rotations(g.library());
    RngStream rng(123);
    for (int i = 0; i < 5000; ++i) {
        Path p = random_path(g, 4, start, rng);
        CHECK(validate_path(g, p));
    }
    for (int i = 0; i < 5000; ++i) {
        Path p = random_path(g, 2, StartPolicy::uniform_random(), rng);
        p = extend_path(g, p, 3, rng);
        CHECK(p.nodes.size() == 5);
        CHECK(validate_path(g, p));
    }
}

TEST_CASE("extension is Markovian: only the last node matters") {
    const BlockGraph g = build_graph(full_library(4));
    const StartPolicy start = StartPolicy::all_rotations(g.library());
    RngStream scout(5);

    // Two different histories ending at the same node.
    Path a, b;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        a = random_path(g, 4, start, scout);
        b = random_path(g, 6, StartPolicy::uniform_random(), scout);
        if (a.nodes.back() == b.nodes.back() && a.nodes != b.nodes) {
            break;
        }
    }
    REQUIRE(a.nodes.back() == b.nodes.back());

    RngStream r1(999), r2(999); // identical generator state
    const Path ea = extend_path(g, a, 5, r1);
    const Path eb = extend_path(g, b, 5, r2);
    const std::vector<std::uint32_t> sa(ea.nodes.end() - 5, ea.nodes.end());
    const std::vector<std::uint32_t> sb(eb.nodes.end() - 5, eb.nodes.end());
    CHECK(sa == sb);

    // zero-length extension is the identity
    RngStream r3(1);
    CHECK(extend_path(g, a, 0, r3) == a);
}

TEST_CASE("transitions from a node are uniform over its out-neighbors") {
    const BlockGraph g = build_graph(full_library(3));
    const std::uint32_t node = std::uint32_t(g.library().all_rotations_index());
    const auto succ = g.successors(node);
    REQUIRE(succ.size() >= 2);

    constexpr int kDraws = 100000;
    std::map<std::uint32_t, int> counts;
    RngStream rng(2024);
    for (int i = 0; i < kDraws; ++i) {
        ++counts[g.step(node, rng)];
    }
    CHECK(counts.size() == succ.size());
    const double p = 1.0 / double(succ.size());
    const double sigma = std::sqrt(kDraws * p * (1 - p));
    for (std::uint32_t s : succ) {
        CHECK(std::abs(counts[s] - kDraws * p) <= 3 * sigma);
    }
}

TEST_CASE("nine-qubit graph has the reference node count") {
    const BlockLibrary lib = full_library(9);
    CHECK(lib.size() == 6688);
    const BlockGraph g = build_graph(lib);
    CHECK(g.node_count() == 6687); // empty block excluded
    const BlockGraph g_all = build_graph(lib, /*exclude_empty=*/false);
    CHECK(g_all.node_count() == 6688);
}
