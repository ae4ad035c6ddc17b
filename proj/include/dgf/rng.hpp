#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

namespace dgf::rng {

/// splitmix64: cheap, well-mixed 64-bit stream. Used both as a generator and
/// to derive independent child seeds, keeping every scenario reproducible
/// from one master seed regardless of evaluation order.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1]: never returns 0, safe for log().
    double uniform() {
        return (double(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Box-Muller, no cached state: deterministic call-for-call.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Normal clipped by rejection to [lo, hi]; falls back to clamping after
    /// 128 draws so pathological bounds cannot hang a run.
    double truncated_normal(double mean, double sigma, double lo, double hi) {
        if (sigma <= 0.0) return std::min(std::max(mean, lo), hi);
        for (int i = 0; i < 128; ++i) {
            const double v = mean + sigma * normal();
            if (v >= lo && v <= hi) return v;
        }
        return std::min(std::max(mean, lo), hi);
    }
};

/// Stable child-seed derivation.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 s(master ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
    return s.next();
}

}  // namespace dgf::rng
