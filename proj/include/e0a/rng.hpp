#ifndef E0A_RNG_HPP
#define E0A_RNG_HPP

#include <cstdint>

// Seeded, platform-independent randomness for tests and campaigns.  Every
// random choice in the project goes through this so that a (seed, config)
// pair replays bit-exactly.

namespace e0a {

struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    int bit() { return static_cast<int>(next() & 1); }

    // uniform in [0, n)
    uint64_t below(uint64_t n) { return next() % n; }
};

// decorrelated stream for work item `index` under a campaign seed
inline uint64_t stream_seed(uint64_t seed, uint64_t index) {
    SplitMix64 mix(seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
    return mix.next();
}

}  // namespace e0a

#endif
