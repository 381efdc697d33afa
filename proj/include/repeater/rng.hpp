#pragma once

#include <cstdint>

namespace repeater {

/// xoshiro256** seeded through splitmix64. Small, fast, and the whole state
/// is reproducible from a single 64-bit seed, which every run records.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = splitmix64(sm);
        }
    }

    /// Independent substream for a worker/chunk index.
    static Xoshiro256 substream(std::uint64_t seed, std::uint64_t index) {
        return Xoshiro256(splitmix64_mix(seed) ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1].
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Bernoulli draw with success probability p.
    bool bernoulli(double p) { return next_unit() <= p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& s) {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static std::uint64_t splitmix64_mix(std::uint64_t s) { return splitmix64(s); }

    std::uint64_t state_[4];
};

} // namespace repeater
