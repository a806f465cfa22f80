#include "mqne/gate_block.hpp"

#include "mqne/errors.hpp"

#include <algorithm>
#include <sstream>

namespace mqne {

int Gate::low_qubit() const {
    return kind == GateKind::Rot ? qubit : std::min(control, target);
}

std::uint32_t GateBlock::support_mask() const {
    std::uint32_t m = 0;
    for (const Gate &g : gates) {
        if (g.kind == GateKind::Rot) {
            m |= 1u << (g.qubit - 1);
        } else {
            m |= (1u << (g.control - 1)) | (1u << (g.target - 1));
        }
    }
    return m;
}

int GateBlock::rot_count() const {
    int n = 0;
    for (const Gate &g : gates) {
        n += g.kind == GateKind::Rot;
    }
    return n;
}

int GateBlock::crx_count() const {
    return int(gates.size()) - rot_count();
}

GateBlock make_block(int k, std::vector<Gate> gates) {
    if (k < 1 || k > 30) {
        throw std::invalid_argument("make_block: k out of range");
    }
    std::uint32_t used = 0;
    auto claim = [&](int q, const char *what) {
        if (q < 1 || q > k) {
            throw std::invalid_argument(std::string("make_block: ") + what +
                                        " qubit out of range");
        }
        const std::uint32_t bit = 1u << (q - 1);
        if (used & bit) {
            throw std::invalid_argument("make_block: qubit used twice");
        }
        used |= bit;
    };
    for (const Gate &g : gates) {
        if (g.kind == GateKind::Rot) {
            claim(g.qubit, "rotation");
        } else {
            if (g.control == g.target) {
                throw std::invalid_argument("make_block: CRx control == target");
            }
            claim(g.control, "control");
            claim(g.target, "target");
        }
    }
    std::sort(gates.begin(), gates.end(), [](const Gate &a, const Gate &b) {
        return a.low_qubit() < b.low_qubit();
    });
    return GateBlock{k, std::move(gates)};
}

EncodingVector encode_block(const GateBlock &block) {
    const int k = block.k;
    EncodingVector v;
    v.k = k;
    v.entries.assign(std::size_t(k) + 2 * std::size_t(k / 2), 0);

    std::vector<const Gate *> pairs;
    for (const Gate &g : block.gates) {
        if (g.is_crx()) {
            pairs.push_back(&g);
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Gate *a, const Gate *b) {
        return a->low_qubit() < b->low_qubit();
    });
    for (std::size_t s = 0; s < pairs.size(); ++s) {
        v.entries[2 * s] = pairs[s]->control;
        v.entries[2 * s + 1] = pairs[s]->target;
    }
    const std::size_t rot_base = 2 * std::size_t(k / 2);
    for (const Gate &g : block.gates) {
        if (!g.is_crx()) {
            v.entries[rot_base + std::size_t(g.qubit) - 1] = g.qubit;
        }
    }
    return v;
}

GateBlock decode_vector(const EncodingVector &vec, bool adjacent_only) {
    const int k = vec.k;
    if (k < 1 || vec.entries.size() != std::size_t(k) + 2 * std::size_t(k / 2)) {
        throw MalformedVectorError("decode_vector: wrong vector length for k=" +
                                   std::to_string(k));
    }
    std::uint32_t used = 0;
    auto claim = [&](int q) {
        if (q < 1 || q > k) {
            throw MalformedVectorError("decode_vector: qubit index " +
                                       std::to_string(q) + " out of range");
        }
        const std::uint32_t bit = 1u << (q - 1);
        if (used & bit) {
            throw MalformedVectorError("decode_vector: qubit " + std::to_string(q) +
                                       " appears twice");
        }
        used |= bit;
    };

    std::vector<Gate> gates;
    const std::size_t crx_len = vec.crx_section_len();
    for (std::size_t s = 0; s < crx_len; s += 2) {
        const int c = vec.entries[s];
        const int t = vec.entries[s + 1];
        if (c == 0 && t == 0) {
            continue;
        }
        if (c == 0 || t == 0) {
            throw MalformedVectorError("decode_vector: half-specified CRx pair");
        }
        if (adjacent_only && std::abs(c - t) != 1) {
            throw MalformedVectorError("decode_vector: CRx pair (" +
                                       std::to_string(c) + "," + std::to_string(t) +
                                       ") is not adjacent");
        }
        claim(c);
        claim(t);
        gates.push_back(Gate::crx(c, t));
    }
    for (int q = 1; q <= k; ++q) {
        const int e = vec.entries[crx_len + std::size_t(q) - 1];
        if (e == 0) {
            continue;
        }
        if (e != q) {
            throw MalformedVectorError("decode_vector: rotation entry " +
                                       std::to_string(e) + " at position " +
                                       std::to_string(q));
        }
        claim(q);
        gates.push_back(Gate::rot(q));
    }
    return make_block(k, std::move(gates));
}

std::string EncodingVector::to_string() const {
    std::ostringstream os;
    const std::size_t crx_len = crx_section_len();
    for (std::size_t i = 0; i < crx_len; ++i) {
        if (i > 0) {
            os << ",";
        }
        os << entries[i];
    }
    os << "; ";
    for (std::size_t i = crx_len; i < entries.size(); ++i) {
        if (i > crx_len) {
            os << ",";
        }
        os << entries[i];
    }
    return os.str();
}

std::string to_string(LibraryMode mode) {
    switch (mode) {
    case LibraryMode::Full:
        return "full";
    case LibraryMode::Cutoff:
        return "cutoff";
    case LibraryMode::Minimal:
        return "minimal";
    case LibraryMode::NonAdjacent:
        return "nonadjacent";
    }
    return "?";
}

LibraryMode library_mode_from_string(const std::string &s) {
    if (s == "full") {
        return LibraryMode::Full;
    }
    if (s == "cutoff") {
        return LibraryMode::Cutoff;
    }
    if (s == "minimal") {
        return LibraryMode::Minimal;
    }
    if (s == "nonadjacent") {
        return LibraryMode::NonAdjacent;
    }
    throw std::invalid_argument("unknown library mode: " + s);
}

void LibrarySpec::validate() const {
    if (k < 1 || k > 30) {
        throw std::invalid_argument("LibrarySpec: k out of range [1,30]");
    }
    if (mode == LibraryMode::Cutoff && (cutoff < 0 || cutoff > k / 2)) {
        throw std::invalid_argument("LibrarySpec: cutoff must be in [0, k/2]");
    }
    if (mode == LibraryMode::Minimal && k < 2) {
        throw std::invalid_argument("LibrarySpec: minimal mode needs k >= 2");
    }
    if (mode == LibraryMode::NonAdjacent && k > 20) {
        throw std::invalid_argument("LibrarySpec: nonadjacent mode limited to k <= 20");
    }
}

BlockLibrary::BlockLibrary(LibrarySpec spec, std::vector<GateBlock> blocks)
    : spec_(spec), blocks_(std::move(blocks)) {
    spec_.validate();
    encodings_.reserve(blocks_.size());
    for (const GateBlock &b : blocks_) {
        if (b.k != spec_.k) {
            throw Error("BlockLibrary: block qubit count mismatch");
        }
        encodings_.push_back(encode_block(b));
    }
    std::vector<std::size_t> order(blocks_.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return encodings_[a] < encodings_[b];
    });
    std::vector<GateBlock> sorted_blocks;
    std::vector<EncodingVector> sorted_encodings;
    sorted_blocks.reserve(blocks_.size());
    sorted_encodings.reserve(blocks_.size());
    for (std::size_t i : order) {
        sorted_blocks.push_back(std::move(blocks_[i]));
        sorted_encodings.push_back(std::move(encodings_[i]));
    }
    blocks_ = std::move(sorted_blocks);
    encodings_ = std::move(sorted_encodings);
    for (std::size_t i = 1; i < encodings_.size(); ++i) {
        if (encodings_[i] == encodings_[i - 1]) {
            throw Error("BlockLibrary: duplicate block " + encodings_[i].to_string());
        }
    }
}

std::optional<std::size_t> BlockLibrary::find(const EncodingVector &v) const {
    auto it = std::lower_bound(encodings_.begin(), encodings_.end(), v);
    if (it != encodings_.end() && *it == v) {
        return std::size_t(it - encodings_.begin());
    }
    return std::nullopt;
}

std::optional<std::size_t> BlockLibrary::find(const GateBlock &b) const {
    return find(encode_block(b));
}

std::size_t BlockLibrary::all_rotations_index() const {
    std::vector<Gate> gates;
    for (int q = 1; q <= spec_.k; ++q) {
        gates.push_back(Gate::rot(q));
    }
    auto idx = find(make_block(spec_.k, std::move(gates)));
    if (!idx) {
        throw Error("BlockLibrary: all-rotations block not present");
    }
    return *idx;
}

std::optional<std::size_t> BlockLibrary::empty_index() const {
    return find(GateBlock{spec_.k, {}});
}

namespace {

using u128 = unsigned __int128;

u128 binom(int n, int r) {
    if (r < 0 || r > n) {
        return 0;
    }
    u128 v = 1;
    for (int i = 1; i <= r; ++i) {
        v = v * u128(n - r + i) / u128(i);
    }
    return v;
}

u128 falling(int n, int r) {
    u128 v = 1;
    for (int i = 0; i < r; ++i) {
        v *= u128(n - i);
    }
    return v;
}

u128 factorial(int n) { return falling(n, n); }

std::uint64_t to_u64(u128 v) {
    if (v > u128(UINT64_MAX)) {
        throw ResourceLimitError("count_closed_form: count exceeds 64 bits");
    }
    return std::uint64_t(v);
}

/**
 * Recursive block generator. Walks qubits in ascending order; at the lowest
 * free qubit it may place identity (unless rotations are mandatory), a Rot,
 * or a CRx to a free partner. Keying every pair by its lower qubit makes
 * each block appear exactly once.
 */
struct Enumerator {
    int k = 0;
    int max_pairs = 0;
    bool rot_mandatory = false;  // Cutoff: remaining qubits all carry Rot
    bool adjacent = true;        // partner must be the next qubit
    bool both_orientations = true;
    std::vector<GateBlock> *out = nullptr;

    std::vector<Gate> current;

    void run() {
        current.clear();
        rec(0u, 1, 0);
    }

    void rec(std::uint32_t used, int q, int pairs_used) {
        while (q <= k && (used & (1u << (q - 1)))) {
            ++q;
        }
        if (q > k) {
            out->push_back(make_block(k, current));
            return;
        }
        const std::uint32_t bit = 1u << (q - 1);
        if (!rot_mandatory) {
            rec(used | bit, q + 1, pairs_used); // identity on q
        }
        current.push_back(Gate::rot(q));
        rec(used | bit, q + 1, pairs_used);
        current.pop_back();
        if (pairs_used < max_pairs) {
            for (int p = q + 1; p <= k; ++p) {
                if (adjacent && p != q + 1) {
                    break;
                }
                if (used & (1u << (p - 1))) {
                    continue;
                }
                const std::uint32_t used2 = used | bit | (1u << (p - 1));
                current.push_back(Gate::crx(q, p));
                rec(used2, q + 1, pairs_used + 1);
                current.pop_back();
                if (both_orientations) {
                    current.push_back(Gate::crx(p, q));
                    rec(used2, q + 1, pairs_used + 1);
                    current.pop_back();
                }
            }
        }
    }
};

std::vector<GateBlock> minimal_blocks(int k) {
    std::vector<GateBlock> blocks;
    std::vector<Gate> rots;
    for (int q = 1; q <= k; ++q) {
        rots.push_back(Gate::rot(q));
    }
    blocks.push_back(make_block(k, std::move(rots)));

    std::vector<Gate> entangler1;
    for (int q = 1; q + 1 <= k; q += 2) {
        entangler1.push_back(Gate::crx(q, q + 1));
    }
    blocks.push_back(make_block(k, std::move(entangler1)));

    // Staggered entangler: pairs (2,3), (4,5), ...; for even k the last pair
    // is left empty rather than wrapping around.
    std::vector<Gate> entangler2;
    for (int q = 2; q + 1 <= k; q += 2) {
        entangler2.push_back(Gate::crx(q, q + 1));
    }
    blocks.push_back(make_block(k, std::move(entangler2)));
    return blocks;
}

} // namespace

std::uint64_t count_closed_form(const LibrarySpec &spec) {
    spec.validate();
    const int k = spec.k;
    u128 total = 0;
    switch (spec.mode) {
    case LibraryMode::Full:
        for (int i = 0; i <= k / 2; ++i) {
            total += (u128(1) << (k - 2 * i)) * binom(k - i, i) * (u128(1) << i);
        }
        break;
    case LibraryMode::Cutoff:
        for (int i = 0; i <= std::min(spec.cutoff, k / 2); ++i) {
            total += binom(k - i, i);
        }
        break;
    case LibraryMode::Minimal:
        total = 3;
        break;
    case LibraryMode::NonAdjacent:
        for (int i = 0; i <= k / 2; ++i) {
            total += (u128(1) << (k - 2 * i)) * falling(k, 2 * i) / factorial(i);
        }
        break;
    }
    const bool has_empty =
        spec.mode == LibraryMode::Full || spec.mode == LibraryMode::NonAdjacent;
    if (has_empty && !spec.include_empty_block) {
        total -= 1;
    }
    return to_u64(total);
}

BlockLibrary enumerate_library(const LibrarySpec &spec, std::size_t max_blocks) {
    spec.validate();
    const std::uint64_t expected = count_closed_form(spec);
    if (expected > max_blocks) {
        throw ResourceLimitError("enumerate_library: closed-form count " +
                                 std::to_string(expected) + " exceeds limit " +
                                 std::to_string(max_blocks));
    }

    std::vector<GateBlock> blocks;
    blocks.reserve(expected);
    switch (spec.mode) {
    case LibraryMode::Minimal:
        blocks = minimal_blocks(spec.k);
        break;
    case LibraryMode::Full:
    case LibraryMode::Cutoff:
    case LibraryMode::NonAdjacent: {
        Enumerator e;
        e.k = spec.k;
        e.out = &blocks;
        if (spec.mode == LibraryMode::Cutoff) {
            e.max_pairs = spec.cutoff;
            e.rot_mandatory = true;
            e.both_orientations = false;
        } else {
            e.max_pairs = spec.k / 2;
            e.adjacent = spec.mode != LibraryMode::NonAdjacent;
        }
        e.run();
        if (!spec.include_empty_block) {
            std::erase_if(blocks, [](const GateBlock &b) { return b.empty(); });
        }
        break;
    }
    }
    BlockLibrary lib(spec, std::move(blocks));
    if (lib.size() != expected) {
        throw Error("enumerate_library: enumeration produced " +
                    std::to_string(lib.size()) + " blocks, closed form says " +
                    std::to_string(expected));
    }
    return lib;
}

BlockLibrary extend_library(const BlockLibrary &lib_km1, const BlockLibrary &lib_k) {
    const LibrarySpec &a = lib_km1.spec();
    const LibrarySpec &b = lib_k.spec();
    if (a.mode != LibraryMode::Full || b.mode != LibraryMode::Full) {
        throw SpecMismatchError("extend_library: both inputs must be Full mode");
    }
    if (!a.include_empty_block || !b.include_empty_block) {
        throw SpecMismatchError("extend_library: inputs must include the empty block");
    }
    if (a.k + 1 != b.k) {
        throw SpecMismatchError("extend_library: qubit counts must be consecutive");
    }
    const int k1 = b.k + 1;
    std::vector<GateBlock> blocks;
    blocks.reserve(2 * lib_k.size() + 2 * lib_km1.size());
    for (const GateBlock &blk : lib_k.blocks()) {
        blocks.push_back(make_block(k1, blk.gates)); // qubit k+1 idle
        std::vector<Gate> with_rot = blk.gates;
        with_rot.push_back(Gate::rot(k1));
        blocks.push_back(make_block(k1, std::move(with_rot)));
    }
    for (const GateBlock &blk : lib_km1.blocks()) {
        for (bool down : {false, true}) {
            std::vector<Gate> gates = blk.gates;
            gates.push_back(down ? Gate::crx(k1, k1 - 1) : Gate::crx(k1 - 1, k1));
            blocks.push_back(make_block(k1, std::move(gates)));
        }
    }
    LibrarySpec spec{k1, LibraryMode::Full, 0, true};
    return BlockLibrary(spec, std::move(blocks));
}

} // namespace mqne
