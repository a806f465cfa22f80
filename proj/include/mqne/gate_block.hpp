#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mqne {

enum class GateKind : std::uint8_t { Rot, CRx };

/**
 * One gate of a depth-1 layer. Qubits are 1-based, matching the integer
 * encoding. Rot is the composed Rz-Rx-Rz single-qubit rotation on `qubit`;
 * CRx is a controlled x-rotation from `control` onto `target`.
 */
struct Gate {
    GateKind kind = GateKind::Rot;
    int qubit = 0;   // Rot only
    int control = 0; // CRx only
    int target = 0;  // CRx only

    static Gate rot(int q) { return Gate{GateKind::Rot, q, 0, 0}; }
    static Gate crx(int c, int t) { return Gate{GateKind::CRx, 0, c, t}; }

    bool is_crx() const { return kind == GateKind::CRx; }
    int low_qubit() const;
    bool operator==(const Gate &) const = default;
};

/**
 * A depth-1 layer on k qubits: every qubit appears in at most one gate.
 * Gates are kept sorted by lowest touched qubit (canonical order).
 */
struct GateBlock {
    int k = 0;
    std::vector<Gate> gates;

    std::uint32_t support_mask() const; // bit (q-1) set iff qubit q is touched
    int rot_count() const;
    int crx_count() const;
    bool empty() const { return gates.empty(); }
    bool operator==(const GateBlock &) const = default;
};

/// Sorts the gates, validates qubit ranges and disjointness, and returns the
/// normalized block. Throws std::invalid_argument on a malformed layer.
GateBlock make_block(int k, std::vector<Gate> gates);

/**
 * The length-(k + 2*floor(k/2)) integer vector of a block. The first
 * 2*floor(k/2) entries hold CRx gates as (control, target) pairs, nonzero
 * pairs first, ordered by their lower qubit; the last k entries flag the
 * rotations, entry i being i when qubit i carries a Rot and 0 otherwise.
 */
struct EncodingVector {
    int k = 0;
    std::vector<int> entries;

    std::size_t crx_section_len() const {
        return 2 * std::size_t(k / 2);
    }
    std::string to_string() const; // "1,2,5,4,0,0; 0,0,3,0,0,6,0"

    bool operator==(const EncodingVector &) const = default;
    bool operator<(const EncodingVector &o) const { return entries < o.entries; }
};

enum class LibraryMode : std::uint8_t { Full, Cutoff, Minimal, NonAdjacent };

std::string to_string(LibraryMode mode);
LibraryMode library_mode_from_string(const std::string &s);

/**
 * Which family of blocks a library enumerates:
 *  - Full:        adjacent-only CRx, either orientation, remaining qubits
 *                 free to carry Rot or identity.
 *  - Cutoff:      at most `cutoff` CRx gates, control on the lower qubit,
 *                 every remaining qubit carries a Rot.
 *  - Minimal:     the fixed three-block library (rotation layer plus the two
 *                 staggered entangler layers).
 *  - NonAdjacent: like Full but CRx may couple any two distinct qubits.
 */
struct LibrarySpec {
    int k = 0;
    LibraryMode mode = LibraryMode::Full;
    int cutoff = 0; // Cutoff mode only
    bool include_empty_block = true;

    void validate() const;
    bool adjacent_only() const { return mode != LibraryMode::NonAdjacent; }
    bool operator==(const LibrarySpec &) const = default;
};

/**
 * An enumerated set of gate-blocks, indexed 0..n-1 in ascending lexicographic
 * order of their encoding vectors. The index <-> block map is a bijection and
 * deterministic for a given spec.
 */
class BlockLibrary {
  public:
    BlockLibrary() = default;
    /// Sorts, encodes and validates distinctness. Throws mqne::Error on
    /// duplicate blocks or k mismatches.
    BlockLibrary(LibrarySpec spec, std::vector<GateBlock> blocks);

    const LibrarySpec &spec() const { return spec_; }
    std::size_t size() const { return blocks_.size(); }
    const GateBlock &block(std::size_t index) const { return blocks_.at(index); }
    const std::vector<GateBlock> &blocks() const { return blocks_; }
    const EncodingVector &encoding(std::size_t index) const {
        return encodings_.at(index);
    }

    std::optional<std::size_t> find(const EncodingVector &v) const;
    std::optional<std::size_t> find(const GateBlock &b) const;

    /// Index of the all-rotations block; throws mqne::Error if absent.
    std::size_t all_rotations_index() const;
    std::optional<std::size_t> empty_index() const;

  private:
    LibrarySpec spec_;
    std::vector<GateBlock> blocks_;
    std::vector<EncodingVector> encodings_; // parallel to blocks_, ascending
};

/// Canonical encoding of a (normalized) block.
EncodingVector encode_block(const GateBlock &block);

/**
 * Inverse of encode_block. Accepts any pair arrangement (zeros may precede
 * nonzero pairs); re-encoding yields the canonical form. Throws
 * MalformedVectorError on half-specified pairs, repeated qubits,
 * out-of-range entries, rotation entries other than 0 or the position index,
 * and non-adjacent CRx pairs when adjacent_only is set.
 */
GateBlock decode_vector(const EncodingVector &vec, bool adjacent_only = true);

inline constexpr std::size_t kDefaultMaxBlocks = std::size_t(1) << 20;

/// All distinct blocks satisfying the spec, canonically ordered. Throws
/// ResourceLimitError when the closed-form count exceeds max_blocks.
BlockLibrary enumerate_library(const LibrarySpec &spec,
                               std::size_t max_blocks = kDefaultMaxBlocks);

/**
 * Closed-form library size, in exact integer arithmetic:
 *   Full:        sum_i 2^(k-2i) * C(k-i, i) * 2^i
 *   Cutoff:      sum_{i<=c} C(k-i, i)
 *   Minimal:     3
 *   NonAdjacent: sum_i 2^(k-2i) * A(k, 2i) / i!
 * with the empty block subtracted when the spec excludes it.
 */
std::uint64_t count_closed_form(const LibrarySpec &spec);

/**
 * Builds the (k+1)-qubit Full library from the k-qubit and (k-1)-qubit Full
 * libraries: every k-qubit block with qubit k+1 left idle or rotated, plus
 * every (k-1)-qubit block with a CRx across (k, k+1) in either orientation.
 * Both inputs must be Full libraries with the empty block included and
 * consecutive k; throws SpecMismatchError otherwise.
 */
BlockLibrary extend_library(const BlockLibrary &lib_km1, const BlockLibrary &lib_k);

} // namespace mqne
