#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace corrdyn {

/// Deterministic 64-bit generator (splitmix64). All randomness in the toolkit
/// flows through this type so results are reproducible across platforms and
/// worker counts; std:: distributions are avoided on purpose (their streams
/// are implementation-defined).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard complex Gaussian via Box-Muller (cosine component is the
    /// real part). Consumes two uniforms.
    std::complex<double> next_complex_gaussian() {
        const double u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double a = 2.0 * M_PI * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stream for task `index` under a master seed. Tasks seeded this way can be
/// executed by any number of workers in any order and still merge to
/// identical results.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix64(seed ^ mix64(index + 0x9E3779B97F4A7C15ull)));
}

} // namespace corrdyn
