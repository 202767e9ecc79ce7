#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace secpol {

/// SplitMix64 finalizer; used to derive independent seeds from (master, index) pairs.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix_seed(mix_seed(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

/// Seeded generator with portable draws (the std distributions are
/// implementation-defined, these are not).
class Rng {
public:
    Rng() : engine_(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] (inclusive).
    long uniform_int(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return lo + static_cast<long>(v % span);
    }

    /// Standard normal via Box-Muller.
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<long>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

    bool operator==(const Rng&) const = default;

private:
    std::mt19937_64 engine_;
};

inline double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace secpol
