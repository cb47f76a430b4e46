#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kroots {

/// Stateless counter-based generator: every variate is a pure function of
/// its key (seed, sample, stream, index), so sample k is reproducible no
/// matter how samples are batched or distributed over threads.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t sample, std::uint64_t stream, std::uint64_t index, std::uint64_t lane = 0) const {
        std::uint64_t h = mix(seed_ ^ 0x9e3779b97f4a7c15ULL);
        h = mix(h ^ sample);
        h = mix(h ^ (stream * 0xd1b54a32d192ed03ULL));
        h = mix(h ^ index);
        return mix(h ^ (lane + 0x632be59bd9b4e019ULL));
    }

    /// Uniform on (0, 1].
    double uniform(std::uint64_t sample, std::uint64_t stream, std::uint64_t index, std::uint64_t lane = 0) const {
        return (static_cast<double>(bits(sample, stream, index, lane) >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller on two lanes of the same key.
    double normal(std::uint64_t sample, std::uint64_t stream, std::uint64_t index) const {
        const double u1 = uniform(sample, stream, index, 0);
        const double u2 = uniform(sample, stream, index, 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace kroots
