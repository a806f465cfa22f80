#include "mqne/rng.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace mqne {

std::size_t RngStream::uniform_index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index: n must be positive");
    }
    // Rejection sampling: discard the low partial range so every residue is
    // equally likely.
    const std::uint64_t threshold = (0 - std::uint64_t(n)) % n;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) {
            return std::size_t(r % n);
        }
    }
}

double RngStream::uniform_real() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_angle() {
    return uniform_real() * 2.0 * M_PI;
}

std::uint64_t fnv1a64(const void *data, std::size_t len, std::uint64_t h) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name,
                          std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = fnv1a64(name);
    h = fnv1a64(&master_seed, sizeof(master_seed), h);
    h = fnv1a64(&a, sizeof(a), h);
    h = fnv1a64(&b, sizeof(b), h);
    return splitmix64(h);
}

} // namespace mqne
