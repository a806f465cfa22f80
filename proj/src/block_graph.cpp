#include "mqne/block_graph.hpp"

#include "mqne/errors.hpp"
#include "mqne/parallel.hpp"

#include <bit>
#include <sstream>

namespace mqne {

namespace {

// Per-block data for the pairwise rule check: the union support mask, one
// support mask per gate, and a bitmask of gate identities. Gate ids:
// Rot(q) -> q-1; CRx keyed by its unordered pair index and orientation.
struct BlockFacts {
    std::uint32_t support = 0;
    std::vector<std::uint32_t> gate_supports;
    std::uint64_t gate_ids[2] = {0, 0};
};

int gate_id(const Gate &g, int k, bool adjacent) {
    if (g.kind == GateKind::Rot) {
        return g.qubit - 1;
    }
    const int lo = std::min(g.control, g.target);
    const int hi = std::max(g.control, g.target);
    int pair_index;
    if (adjacent) {
        pair_index = lo - 1; // pairs (1,2), (2,3), ...
    } else {
        // unordered pairs in lexicographic order
        pair_index = (lo - 1) * k - (lo - 1) * lo / 2 + (hi - lo - 1);
    }
    return k + 2 * pair_index + (g.control < g.target ? 0 : 1);
}

BlockFacts facts_for(const GateBlock &b, bool adjacent) {
    BlockFacts f;
    f.support = b.support_mask();
    f.gate_supports.reserve(b.gates.size());
    for (const Gate &g : b.gates) {
        std::uint32_t m;
        if (g.kind == GateKind::Rot) {
            m = 1u << (g.qubit - 1);
        } else {
            m = (1u << (g.control - 1)) | (1u << (g.target - 1));
        }
        f.gate_supports.push_back(m);
        const int id = gate_id(g, b.k, adjacent);
        f.gate_ids[id / 64] |= std::uint64_t(1) << (id % 64);
    }
    return f;
}

bool allowed(const BlockFacts &x, const BlockFacts &y) {
    // (b) no identical gate repeated
    if ((x.gate_ids[0] & y.gate_ids[0]) || (x.gate_ids[1] & y.gate_ids[1])) {
        return false;
    }
    // (a) every gate of y must overlap x's support
    for (std::uint32_t m : y.gate_supports) {
        if ((m & x.support) == 0) {
            return false;
        }
    }
    return true;
}

} // namespace

bool allowed_successor(const GateBlock &x, const GateBlock &y) {
    if (x.k != y.k) {
        throw DimensionError("allowed_successor: blocks on different qubit counts");
    }
    const std::uint32_t support = x.support_mask();
    for (const Gate &g : y.gates) {
        const std::uint32_t m =
            g.kind == GateKind::Rot
                ? 1u << (g.qubit - 1)
                : (1u << (g.control - 1)) | (1u << (g.target - 1));
        if ((m & support) == 0) {
            return false; // rule (a): g could run in parallel with x
        }
        for (const Gate &h : x.gates) {
            if (g == h) {
                return false; // rule (b): exact repetition
            }
        }
    }
    return true;
}

BlockGraph build_graph(BlockLibrary lib, bool exclude_empty,
                       std::size_t max_nodes, int threads) {
    const std::size_t n = lib.size();
    if (n > max_nodes) {
        throw ResourceLimitError("build_graph: " + std::to_string(n) +
                                 " nodes exceeds limit " + std::to_string(max_nodes));
    }
    const int k = lib.spec().k;
    const bool adjacent = lib.spec().adjacent_only();
    const int id_space = adjacent ? k + 2 * (k - 1) : k + k * (k - 1);
    if (id_space > 128) {
        throw ResourceLimitError("build_graph: gate id space exceeds 128 bits");
    }

    BlockGraph g;
    g.lib_ = std::move(lib);
    g.words_ = (n + 63) / 64;
    g.bits_.assign(n * g.words_, 0);
    g.out_degree_.assign(n, 0);
    g.active_.assign(n, 1);
    if (exclude_empty) {
        if (auto e = g.lib_.empty_index()) {
            g.active_[*e] = 0;
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (g.active_[i]) {
            g.active_nodes_.push_back(i);
        }
    }

    std::vector<BlockFacts> facts;
    facts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        facts.push_back(facts_for(g.lib_.block(i), adjacent));
    }

    auto *bits = g.bits_.data();
    const std::size_t words = g.words_;
    parallel_for(n, threads, [&](std::size_t x) {
        if (!g.active_[x]) {
            return;
        }
        std::uint64_t *row = bits + x * words;
        std::uint32_t deg = 0;
        for (std::size_t y = 0; y < n; ++y) {
            if (!g.active_[y] || x == y) {
                continue;
            }
            if (allowed(facts[x], facts[y])) {
                row[y / 64] |= std::uint64_t(1) << (y % 64);
                ++deg;
            }
        }
        g.out_degree_[x] = deg;
    });
    return g;
}

bool BlockGraph::edge(std::uint32_t from, std::uint32_t to) const {
    if (from >= active_.size() || to >= active_.size()) {
        throw std::out_of_range("BlockGraph::edge: node out of range");
    }
    return (bits_[std::size_t(from) * words_ + to / 64] >>
            (to % 64)) & 1u;
}

std::uint64_t BlockGraph::edge_count() const {
    std::uint64_t total = 0;
    for (std::uint32_t d : out_degree_) {
        total += d;
    }
    return total;
}

std::vector<std::uint32_t> BlockGraph::successors(std::uint32_t node) const {
    std::vector<std::uint32_t> out;
    out.reserve(out_degree_.at(node));
    const std::uint64_t *row = bits_.data() + std::size_t(node) * words_;
    for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t word = row[w];
        while (word) {
            const int b = std::countr_zero(word);
            out.push_back(std::uint32_t(w * 64 + b));
            word &= word - 1;
        }
    }
    return out;
}

std::uint32_t BlockGraph::step(std::uint32_t node, RngStream &rng) const {
    const std::uint32_t deg = out_degree_.at(node);
    if (deg == 0) {
        throw Error("BlockGraph::step: node " + std::to_string(node) +
                    " has no successors (dead end)");
    }
    std::size_t r = rng.uniform_index(deg);
    const std::uint64_t *row = bits_.data() + std::size_t(node) * words_;
    for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t word = row[w];
        const std::size_t cnt = std::size_t(std::popcount(word));
        if (r >= cnt) {
            r -= cnt;
            continue;
        }
        for (;;) {
            const int b = std::countr_zero(word);
            if (r == 0) {
                return std::uint32_t(w * 64 + b);
            }
            word &= word - 1;
            --r;
        }
    }
    throw Error("BlockGraph::step: adjacency row inconsistent with out-degree");
}

std::string Path::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) {
            os << " -> ";
        }
        os << nodes[i];
    }
    return os.str();
}

StartPolicy StartPolicy::all_rotations(const BlockLibrary &lib) {
    return fixed(std::uint32_t(lib.all_rotations_index()));
}

Path random_path(const BlockGraph &graph, std::size_t length,
                 const StartPolicy &policy, RngStream &rng) {
    if (length < 1) {
        throw std::invalid_argument("random_path: length must be >= 1");
    }
    Path p;
    p.nodes.reserve(length);
    std::uint32_t node;
    if (policy.kind == StartPolicy::Kind::FixedBlock) {
        if (!graph.active(policy.block)) {
            throw std::invalid_argument("random_path: start node " +
                                        std::to_string(policy.block) +
                                        " is not an active graph node");
        }
        node = policy.block;
    } else {
        const auto &nodes = graph.active_nodes();
        if (nodes.empty()) {
            throw Error("random_path: graph has no active nodes");
        }
        node = nodes[rng.uniform_index(nodes.size())];
    }
    p.nodes.push_back(node);
    for (std::size_t i = 1; i < length; ++i) {
        node = graph.step(node, rng);
        p.nodes.push_back(node);
    }
    return p;
}

Path extend_path(const BlockGraph &graph, const Path &path,
                 std::size_t segment_length, RngStream &rng) {
    if (path.nodes.empty()) {
        throw std::invalid_argument("extend_path: empty path");
    }
    Path out = path;
    // Markov contract: only the terminal node feeds the walk.
    std::uint32_t node = out.nodes.back();
    for (std::size_t i = 0; i < segment_length; ++i) {
        node = graph.step(node, rng);
        out.nodes.push_back(node);
    }
    return out;
}

bool validate_path(const BlockGraph &graph, const Path &path) {
    if (path.nodes.empty()) {
        return false;
    }
    for (std::uint32_t n : path.nodes) {
        if (!graph.active(n)) {
            return false;
        }
    }
    for (std::size_t i = 1; i < path.nodes.size(); ++i) {
        if (!graph.edge(path.nodes[i - 1], path.nodes[i])) {
            return false;
        }
    }
    return true;
}

} // namespace mqne
