#ifndef CRB_RNG_HPP
#define CRB_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace crb {

// All randomness in the library flows through explicitly seeded streams so
// that every stochastic routine is reproducible bit-for-bit and independent
// streams can be derived per experiment cell, per node, or per row without
// sharing mutable state.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Collapses a seed plus up to three stream labels into one 64-bit key.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = seed;
    std::uint64_t key = splitmix64(s);
    s ^= a + 0x632be59bd9b4e019ULL;
    key ^= splitmix64(s);
    s ^= b + 0x9e6c63d0876a9a62ULL;
    key ^= splitmix64(s);
    s ^= c + 0xc2b2ae3d27d4eb4fULL;
    key ^= splitmix64(s);
    return key;
}

// xoshiro256++ seeded through splitmix64.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    RngStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
        : RngStream(derive_seed(seed, a, b, c)) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double next_unit_positive() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Standard normal via the trigonometric Box-Muller form. One value per
    // call; no cached second value, so draw counts stay predictable.
    double next_gaussian() {
        const double radius = std::sqrt(-2.0 * std::log(next_unit_positive()));
        const double angle = 2.0 * std::numbers::pi * next_unit();
        return radius * std::cos(angle);
    }

    // Index in [0, n) by widening multiply; bias is O(n / 2^64).
    std::size_t next_index(std::size_t n) {
        const auto wide = static_cast<unsigned __int128>(next_u64()) *
                          static_cast<unsigned __int128>(n);
        return static_cast<std::size_t>(wide >> 64);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_;
};

}  // namespace crb

#endif
