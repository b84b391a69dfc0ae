#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace relaygs {

// Deterministic random source. All sampling goes through explicit helpers so
// the byte-level stream depends only on the seed, never on the standard
// library's distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // i in [0, n).
    uint64_t uniform_index(uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    // Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// FNV-1a combine of a seed with a salt; used to derive independent streams
// (per stage, per worker) that do not depend on how much of the parent
// stream was consumed. Resumed runs rely on this.
inline uint64_t seed_combine(uint64_t seed, uint64_t salt) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ull;
        }
    };
    mix(seed);
    mix(salt);
    return h;
}

}  // namespace relaygs
