#pragma once

#include <cstdint>

namespace loophole {

/// Small deterministic PRNG (splitmix64). Used instead of <random> engines so
/// that simulation output is identical across platforms and standard-library
/// implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Unbiased draw from {0, ..., n-1} by rejection from the top.
    std::uint64_t bounded(std::uint64_t n) {
        if (n < 2) return 0;
        const std::uint64_t t = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next();
            if (r >= t) return r % n;
        }
    }

    bool bit() { return next() >> 63; }

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed for a worker chunk; merging per-chunk
/// results reproduces the single-worker output for the same master seed.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 g(master ^ (0xA0761D6478BD642Full * (stream + 1)));
    g.next();
    return g.next();
}

}  // namespace loophole
