#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>

namespace rmdp {

/// SplitMix64 finalizer; used to derive independent per-cell seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a work item identified by a root seed and a path of indices.
constexpr std::uint64_t derive_seed(std::uint64_t root,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = mix_seed(root);
    for (auto i : path) s = mix_seed(s ^ mix_seed(i + 1));
    return s;
}

/**
 * Portable random source. Variates are built directly from mt19937_64 output
 * so streams are reproducible across standard library implementations.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Type-I extreme value with scale 1 and mean 0.
    double gumbel() noexcept {
        return -std::log(-std::log(uniform())) - std::numbers::egamma;
    }

    /// Inverse-CDF draw of an atom index from probability weights.
    std::size_t categorical(std::span<const double> probs) noexcept {
        return categorical(probs, uniform());
    }

    static std::size_t categorical(std::span<const double> probs, double u) noexcept {
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            last = i;
            acc += probs[i];
            if (u < acc) return i;
        }
        return last;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace rmdp
