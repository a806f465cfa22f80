#pragma once

#include "mqne/gate_block.hpp"
#include "mqne/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mqne {

/**
 * Connection rule for consecutive gate-blocks: y may directly follow x iff
 *  (a) every gate of y touches at least one qubit that x touches (otherwise
 *      the gate could slide into x's layer and run in parallel), and
 *  (b) no gate of y repeats a gate of x exactly: same kind, same qubits,
 *      same control/target orientation. A reversed CRx on the same pair is
 *      a different gate and is allowed.
 * Throws DimensionError when the blocks live on different qubit counts.
 */
bool allowed_successor(const GateBlock &x, const GateBlock &y);

/// A node sequence; consecutive nodes must be joined by graph edges.
struct Path {
    std::vector<std::uint32_t> nodes;

    std::string to_string() const; // "4257 -> 6687 -> ..."
    bool operator==(const Path &) const = default;
};

struct StartPolicy {
    enum class Kind : std::uint8_t { UniformRandom, FixedBlock };
    Kind kind = Kind::FixedBlock;
    std::uint32_t block = 0;

    static StartPolicy uniform_random() {
        return StartPolicy{Kind::UniformRandom, 0};
    }
    static StartPolicy fixed(std::uint32_t node) {
        return StartPolicy{Kind::FixedBlock, node};
    }
    /// The default start: the all-rotations block of the library.
    static StartPolicy all_rotations(const BlockLibrary &lib);
};

inline constexpr std::size_t kDefaultMaxGraphNodes = 32768;

/**
 * Directed graph of legal gate-block successions with packed-bitset
 * adjacency rows. Nodes are labelled by library index; when the empty block
 * is excluded it is simply inactive (all-zero row and column), so labels
 * stay stable either way.
 */
class BlockGraph {
  public:
    BlockGraph() = default;

    const BlockLibrary &library() const { return lib_; }
    std::size_t node_count() const { return active_nodes_.size(); }
    const std::vector<std::uint32_t> &active_nodes() const { return active_nodes_; }
    bool active(std::uint32_t node) const {
        return node < active_.size() && active_[node] != 0;
    }
    bool edge(std::uint32_t from, std::uint32_t to) const;
    std::uint32_t out_degree(std::uint32_t node) const {
        return out_degree_.at(node);
    }
    std::uint64_t edge_count() const;
    std::vector<std::uint32_t> successors(std::uint32_t node) const; // ascending

    /// Uniform draw over the out-neighbors of `node`. Throws mqne::Error on a
    /// dead end (out-degree zero).
    std::uint32_t step(std::uint32_t node, RngStream &rng) const;

  private:
    friend BlockGraph build_graph(BlockLibrary lib, bool exclude_empty,
                                  std::size_t max_nodes, int threads);

    BlockLibrary lib_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_; // row-major, size() * words_
    std::vector<std::uint32_t> out_degree_;
    std::vector<std::uint8_t> active_;
    std::vector<std::uint32_t> active_nodes_;
};

/// Evaluates the connection rules over all block pairs. Throws
/// ResourceLimitError when the library exceeds max_nodes.
BlockGraph build_graph(BlockLibrary lib, bool exclude_empty = true,
                       std::size_t max_nodes = kDefaultMaxGraphNodes,
                       int threads = 1);

/// A path of exactly `length` nodes: first node per policy, each next node
/// uniform over the out-neighbors of the previous one.
Path random_path(const BlockGraph &graph, std::size_t length,
                 const StartPolicy &policy, RngStream &rng);

/// Appends `segment_length` nodes by uniform random walk. The extension
/// consults only the final node of the input path.
Path extend_path(const BlockGraph &graph, const Path &path,
                 std::size_t segment_length, RngStream &rng);

/// True iff every node is active and every consecutive pair is an edge.
bool validate_path(const BlockGraph &graph, const Path &path);

} // namespace mqne
