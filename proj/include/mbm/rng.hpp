#pragma once

#include <cstdint>
#include <initializer_list>

namespace mbm {

// SplitMix64 finalizer. Bijective on 64-bit words, good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives the seed of an independent substream from a root seed and a key
// path, e.g. substream(seed, {kTagEstimate, trial, cloud}). Distinct paths
// give unrelated streams, so trials can run in any order or in parallel
// without changing what each one draws.
inline std::uint64_t substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(seed ^ 0xA0761D6478BD642Full);
    for (std::uint64_t k : path)
        h = mix64(h ^ mix64(k + 0xE7037ED1A0B428DBull));
    return h;
}

// Counter-based generator: the state walks the golden-ratio sequence and the
// output is the mixed counter (SplitMix64).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Exponential with rate 1.
    double next_exponential();

    // Poisson(mean). Inversion below mean 30, PTRS transformed rejection above.
    long next_poisson(double mean);

private:
    std::uint64_t state_;
};

}  // namespace mbm
