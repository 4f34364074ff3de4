#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mcpt {

// SplitMix64 finalizer; used to turn (seed, stream ids) into decorrelated
// engine seeds so workers never share a stream.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return h;
}

// mt19937_64 with explicit output mappings. The canonical mapping is spelled
// out (instead of std::uniform_real_distribution) so that a fixed seed yields
// the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // uniform double in [0, 1)
    double canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return canonical() < p; }

    // standard normal via Box-Muller; two fresh uniforms per call
    double normal() {
        const double u1 = 1.0 - canonical();  // (0, 1], keeps log finite
        const double u2 = canonical();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Compensated (Kahan) accumulator; tally merging must not depend on summation
// order beyond 1e-10, so every tally reduction goes through this.
class KahanSum {
public:
    void add(double x) {
        const double y = x - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace mcpt
