#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rdlattice {

// Seed derivation scheme used everywhere randomness is consumed:
// a single root seed is combined with a component name and a stream
// index, so ensembles get independent, reproducible streams.
//
//   stream = splitmix64(splitmix64(root ^ fnv1a64(name)) ^ (index+1)*PHI64)
//
// The derivation is part of the output contract: identical
// (root, name, index) always yields the identical stream.
inline constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden64;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : s) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                                    std::uint64_t index = 0) {
    const std::uint64_t base = splitmix64(root ^ fnv1a64(component));
    return splitmix64(base ^ ((index + 1) * kGolden64));
}

// Gaussian sampler with a fully specified algorithm (mt19937_64 +
// Box-Muller), so paths are bit-reproducible for a given seed and do
// not depend on the standard library's normal_distribution.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    // Uniform in the open interval (0,1).
    double uniform() {
        const std::uint64_t bits = engine_() >> 11;  // 53 random bits
        return (static_cast<double>(bits) + 0.5) * 0x1p-53;
    }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // Exponential with rate lambda > 0.
    double exponential(double lambda) { return -std::log(uniform()) / lambda; }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace rdlattice
