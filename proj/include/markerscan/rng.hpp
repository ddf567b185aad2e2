#pragma once

#include <cmath>
#include <cstdint>

namespace markerscan {

// splitmix64 finalizer.
inline uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// Stream seed for substream (a, b) of a master seed; used to give every
// generated document its own independent, order-free random stream.
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b) {
    uint64_t s = mix64(seed ^ (a * 0x9E3779B97F4A7C15ull));
    return mix64(s ^ (b * 0xC2B2AE3D27D4EB4Full));
}

// splitmix64 generator: tiny state, good equidistribution, fully portable.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() { return mix64(state_ += 0x9E3779B97F4A7C15ull); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [0, n); n > 0
    uint64_t below(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next()) * n) >> 64);
    }

    // Knuth multiplication method; adequate for the small lambdas used here.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        double limit = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > limit);
        return k - 1;
    }

private:
    uint64_t state_;
};

}  // namespace markerscan
