#pragma once

#include <cmath>
#include <vector>

#include "nlem/errors.hpp"
#include "nlem/image.hpp"

namespace nlem {

// Checkerboard of alternating 0/255 squares, top-left square black.
inline Image make_checker(int size = 256, int square = 32) {
    if (size < 1 || square < 1)
        throw invalid_parameter("checker size and square must be positive");
    if (size % square != 0)
        throw invalid_parameter("checker size must be divisible by square size");
    std::vector<double> data(static_cast<std::size_t>(size) * size);
    std::size_t n = 0;
    for (int row = 0; row < size; ++row)
        for (int col = 0; col < size; ++col)
            data[n++] = ((row / square + col / square) % 2 == 0) ? 0.0 : 255.0;
    return Image(size, size, std::move(data));
}

// Concentric rings about the image center, alternating 255/0 by ring parity;
// the center disk is white.
inline Image make_circles(int size = 256, int ring_width = 16) {
    if (size < 1)
        throw invalid_parameter("circles size must be positive");
    if (ring_width < 1)
        throw invalid_parameter("ring width must be at least 1");
    const double center = (size - 1) / 2.0;
    std::vector<double> data(static_cast<std::size_t>(size) * size);
    std::size_t n = 0;
    for (int row = 0; row < size; ++row) {
        for (int col = 0; col < size; ++col) {
            const double r = std::hypot(row - center, col - center);
            const int band = static_cast<int>(r / ring_width);
            data[n++] = (band % 2 == 0) ? 255.0 : 0.0;
        }
    }
    return Image(size, size, std::move(data));
}

// Clean 1D step edge of unit height: 0 left of edge_position, 1 from it on.
struct EdgeSignal1D {
    std::vector<double> samples;
    int edge_position = 0;
};

inline EdgeSignal1D make_edge_1d(int n, int edge_position) {
    if (n < 2)
        throw invalid_parameter("edge signal needs at least 2 samples");
    if (edge_position <= 0 || edge_position >= n)
        throw invalid_parameter("edge position must be strictly inside the signal");
    EdgeSignal1D signal;
    signal.edge_position = edge_position;
    signal.samples.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        signal.samples[static_cast<std::size_t>(j)] = j < edge_position ? 0.0 : 1.0;
    return signal;
}

} // namespace nlem
