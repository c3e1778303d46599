#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace relaysec {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

// Derives an independent deterministic stream seed from a base seed and up to
// two stream indices. Used so that parallel blocks / grid rows reproduce
// bit-identically regardless of scheduling.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
    std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ull);
    h = mix64(h ^ (a + 0x9E3779B97F4A7C15ull));
    h = mix64(h ^ (b + 0xD1B54A32D192ED03ull));
    return h;
}

// Deterministic random source. Gaussian draws use Box-Muller on raw 53-bit
// uniforms, so sequences are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform index in [0, n). Modulo bias is O(n / 2^64), irrelevant here.
    int uniform_index(int n) {
        return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
    }

    // Pair of independent standard normals packed as a complex value.
    std::complex<double> standard_normal_pair() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    // Circularly-symmetric complex Gaussian with the given total variance
    // (variance/2 per real dimension).
    std::complex<double> complex_gaussian(double total_variance) {
        return std::sqrt(total_variance * 0.5) * standard_normal_pair();
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace relaysec
