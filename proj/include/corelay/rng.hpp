#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace corelay {

// Deterministic seeded random stream. Streams are identified by (seed, label,
// index); distinct labels give statistically independent substreams. All
// distributions are derived from the raw engine by explicit formulas so that
// output is bit-identical across compilers and standard libraries.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id, std::uint64_t index = 0)
        : engine_(mix(seed ^ fnv1a(stream_id), index)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // Unit-mean exponential; the power coefficient of Rayleigh amplitude fading.
    double rayleigh_power() { return exponential(1.0); }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    // splitmix64; also used to derive per-point seeds in sweeps.
    static std::uint64_t mix(std::uint64_t z, std::uint64_t salt = 0) {
        z += 0x9e3779b97f4a7c15ULL + salt * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace corelay
