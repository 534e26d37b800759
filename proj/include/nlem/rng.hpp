#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace nlem {

// SplitMix64 (Steele, Lea, Flood). The generator behind every random stream
// in this project; pinned so other implementations can reproduce streams
// bit for bit.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in (0,1): top 53 bits scaled by 2^-53, with a zero
    // mantissa nudged up to keep log() finite.
    double next_unit() {
        std::uint64_t bits = next() >> 11;
        if (bits == 0) bits = 1;
        return static_cast<double>(bits) * 0x1p-53;
    }

    // Box-Muller transform over two consecutive draws; both outputs returned.
    std::pair<double, double> next_gaussian_pair() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    std::uint64_t state_;
};

// Per-trial seed: first output of SplitMix64 seeded with master XOR index.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return SplitMix64(master_seed ^ index).next();
}

} // namespace nlem
