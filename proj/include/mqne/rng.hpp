#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mqne {

/**
 * Deterministic random stream. Every run derives all of its randomness from
 * one master seed through named sub-streams (derive_seed / derive_stream), so
 * results are reproducible and independent of thread count.
 *
 * Integer and real draws are implemented by hand on top of the (fully
 * specified) mt19937_64 engine; std::uniform_int_distribution and friends are
 * avoided because their output is implementation-defined.
 */
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Unbiased index in [0, n) via rejection sampling.
    std::size_t uniform_index(std::size_t n);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform_real();

    /// Uniform angle in [0, 2*pi).
    double uniform_angle();

    /// Fisher-Yates shuffle driven by uniform_index.
    template <typename T> void shuffle(std::vector<T> &v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

/// FNV-1a over raw bytes; also used for content hashes in run manifests.
std::uint64_t fnv1a64(const void *data, std::size_t len,
                      std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64(std::string_view s);

/// Seed of the named sub-stream (name, a, b) of a master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name,
                          std::uint64_t a = 0, std::uint64_t b = 0);

inline RngStream derive_stream(std::uint64_t master_seed, std::string_view name,
                               std::uint64_t a = 0, std::uint64_t b = 0) {
    return RngStream(derive_seed(master_seed, name, a, b));
}

} // namespace mqne
