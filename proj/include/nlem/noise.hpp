#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nlem/errors.hpp"
#include "nlem/image.hpp"
#include "nlem/rng.hpp"

namespace nlem {

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

// Adds N(0, sigma^2) samples to values in place. One SplitMix64 stream,
// consumed pairwise in storage order: each Box-Muller call yields two normals
// for two consecutive samples; an odd trailing sample uses the first output
// of a final pair and discards the second.
inline void add_gaussian_noise(std::vector<double>& values, const NoiseSpec& spec) {
    if (spec.sigma < 0 || !std::isfinite(spec.sigma))
        throw invalid_parameter("noise sigma must be finite and nonnegative");
    if (spec.sigma == 0)
        return;
    SplitMix64 rng(spec.seed);
    const std::size_t n = values.size();
    for (std::size_t m = 0; m < n; m += 2) {
        const auto [z0, z1] = rng.next_gaussian_pair();
        values[m] += spec.sigma * z0;
        if (m + 1 < n)
            values[m + 1] += spec.sigma * z1;
    }
}

} // namespace detail

// Seeded white Gaussian noise, row-major, not clipped to [0,255].
inline Image add_noise(const Image& img, const NoiseSpec& spec) {
    std::vector<double> data = img.data();
    detail::add_gaussian_noise(data, spec);
    return Image(img.width(), img.height(), std::move(data));
}

// Same stream contract for 1D signals.
inline std::vector<double> add_noise(const std::vector<double>& samples, const NoiseSpec& spec) {
    std::vector<double> out = samples;
    detail::add_gaussian_noise(out, spec);
    return out;
}

// Robust noise estimate: median absolute value of the 5-point Laplacian
// (weights -1,-1,4,-1,-1) over interior pixels, divided by 0.6745 * sqrt(20).
// sqrt(20) is the stencil's noise gain, 0.6745 the Gaussian MAD constant.
inline double estimate_sigma(const Image& img) {
    const int w = img.width();
    const int h = img.height();
    if (w < 3 || h < 3)
        throw invalid_parameter("sigma estimation needs at least a 3x3 image");
    std::vector<double> residuals;
    residuals.reserve(static_cast<std::size_t>(w - 2) * (h - 2));
    for (int row = 1; row < h - 1; ++row) {
        for (int col = 1; col < w - 1; ++col) {
            const double lap = 4.0 * img.at(row, col) - img.at(row - 1, col) -
                               img.at(row + 1, col) - img.at(row, col - 1) -
                               img.at(row, col + 1);
            residuals.push_back(std::abs(lap));
        }
    }
    const std::size_t n = residuals.size();
    const std::size_t mid = n / 2;
    std::nth_element(residuals.begin(), residuals.begin() + mid, residuals.end());
    double median = residuals[mid];
    if (n % 2 == 0) {
        // average of the two middle order statistics
        const double below = *std::max_element(residuals.begin(), residuals.begin() + mid);
        median = 0.5 * (below + median);
    }
    return median / (0.6745 * std::sqrt(20.0));
}

} // namespace nlem
