#pragma once

#include <cstdint>

namespace pantograph {

/// Deterministic 64-bit generator (xoshiro256**) with explicit stream
/// splitting. Identical (seed, stream) reproduces identical draws on every
/// platform; distributions below avoid std:: ones, whose outputs are not
/// portable across standard libraries.
class SeededRng {
  public:
    explicit SeededRng(uint64_t seed, uint64_t stream = 0)
        : seed_(seed), stream_(stream) {
        uint64_t sm = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        for (auto& word : s_) word = splitmix64(sm);
    }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    uint64_t next() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound >= 1. Multiply-shift with
    /// rejection, bias-free and platform-independent.
    uint64_t uniform_below(uint64_t bound) {
        __uint128_t m = static_cast<__uint128_t>(next()) * bound;
        uint64_t low = static_cast<uint64_t>(m);
        if (low < bound) {
            const uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<__uint128_t>(next()) * bound;
                low = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    bool bernoulli(double prob) { return uniform01() < prob; }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& state) {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t seed_, stream_;
    uint64_t s_[4];
};

}  // namespace pantograph
