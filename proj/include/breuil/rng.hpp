#pragma once

#include <cstdint>

namespace breuil {

// SplitMix64.  Counter-based and cheap to split: fixtures generated from a
// seed are reproducible across platforms, and derived streams never collide
// with the parent stream.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }

    // Inclusive range.
    int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1))); }

    Rng split(uint64_t stream) const {
        Rng child(state ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
        child.next();
        return child;
    }
};

}  // namespace breuil
