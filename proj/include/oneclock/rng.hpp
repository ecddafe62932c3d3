#pragma once

#include <cmath>
#include <cstdint>

namespace oneclock {

// Splitmix64 generator. Every stochastic component in the toolkit draws from
// this generator so that results are bit-reproducible across platforms;
// <random> distributions are implementation-defined and never used.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1], safe as a log() argument
    double next_uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // standard normal via Box-Muller
    double next_normal() {
        const double u1 = next_uniform_pos();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

// Mixes an arbitrary list of 64-bit keys into one seed. Used to derive
// independent named streams (run seeds, per-draw perturbation streams).
inline std::uint64_t mix_seed(std::uint64_t a) {
    SplitMix64 g(a);
    return g.next_u64();
}

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, Rest... rest) {
    SplitMix64 g(a ^ 0x9E3779B97F4A7C15ULL);
    std::uint64_t h = g.next_u64() ^ b;
    if constexpr (sizeof...(rest) == 0) {
        return mix_seed(h);
    } else {
        return mix_seed(h, rest...);
    }
}

// FNV-1a over a string, for keying streams by experiment id.
inline std::uint64_t hash_str(const char* s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (; *s; ++s) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(*s));
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace oneclock
