#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "nlem/errors.hpp"

namespace nlem {

// 0-based pixel coordinate, row before column.
struct PixelIndex {
    int row = 0;
    int col = 0;

    friend bool operator==(PixelIndex a, PixelIndex b) {
        return a.row == b.row && a.col == b.col;
    }
};

// Grayscale image with double-precision intensities, stored row-major.
//
// Intensities are nominally 0..255 but are not clamped: noisy images may
// leave that range and only PGM export quantizes. Values must be finite.
// Images are immutable once constructed and safe to share across threads.
class Image {
public:
    Image() = default;

    Image(int width, int height)
        : Image(width, height,
                std::vector<double>(checked_size(width, height), 0.0)) {}

    Image(int width, int height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != checked_size(width, height))
            throw invalid_input("image data length does not match width*height");
        for (double v : data_)
            if (!std::isfinite(v))
                throw invalid_input("image intensities must be finite");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double at(int row, int col) const {
        return data_[static_cast<std::size_t>(row) * width_ + col];
    }
    double at(PixelIndex i) const { return at(i.row, i.col); }

    bool in_bounds(PixelIndex i) const {
        return i.row >= 0 && i.row < height_ && i.col >= 0 && i.col < width_;
    }

    bool same_size(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    const std::vector<double>& data() const { return data_; }

private:
    static std::size_t checked_size(int width, int height) {
        if (width < 1 || height < 1)
            throw invalid_parameter("image dimensions must be at least 1x1");
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

// Vectorized k x k neighborhood of a pixel, row-major; a point in R^(k^2).
struct Patch {
    std::vector<double> values;
    int k = 0;

    double center() const { return values[(static_cast<std::size_t>(k) * k - 1) / 2]; }
};

// Mirror an index into [0, n) by reflecting about the borders without
// repeating the border sample: -1 -> 1, n -> n-2.
inline int mirror_index(int p, int n) {
    if (n == 1) return 0;
    while (p < 0 || p >= n) {
        if (p < 0) p = -p;
        if (p >= n) p = 2 * n - 2 - p;
    }
    return p;
}

namespace detail {

inline void require_odd_patch_size(int k, int width, int height) {
    if (k < 1 || k % 2 == 0)
        throw invalid_parameter("patch size must be odd and positive");
    if (k > std::min(width, height))
        throw invalid_parameter("patch size exceeds image dimensions");
}

// Writes the k x k mirror-padded window centered at (row, col) into out
// (row-major, exactly k*k values).
inline void fill_patch(const Image& img, int row, int col, int k, double* out) {
    const int r = (k - 1) / 2;
    std::size_t p = 0;
    for (int dr = -r; dr <= r; ++dr) {
        const int rr = mirror_index(row + dr, img.height());
        for (int dc = -r; dc <= r; ++dc) {
            const int cc = mirror_index(col + dc, img.width());
            out[p++] = img.at(rr, cc);
        }
    }
}

} // namespace detail

// The k x k patch centered at i, with out-of-image pixels obtained by
// symmetric (mirror, no border repetition) padding.
inline Patch extract_patch(const Image& img, PixelIndex i, int k) {
    detail::require_odd_patch_size(k, img.width(), img.height());
    if (!img.in_bounds(i))
        throw invalid_input("pixel index out of bounds");
    Patch patch;
    patch.k = k;
    patch.values.resize(static_cast<std::size_t>(k) * k);
    detail::fill_patch(img, i.row, i.col, k, patch.values.data());
    return patch;
}

// All in-bounds pixels of the S x S square centered at i, row-major.
// The window truncates at image borders rather than padding.
inline std::vector<PixelIndex> search_window(PixelIndex i, int S, int width, int height) {
    if (S < 1 || S % 2 == 0)
        throw invalid_parameter("search window size must be odd and positive");
    if (i.row < 0 || i.row >= height || i.col < 0 || i.col >= width)
        throw invalid_input("pixel index out of bounds");
    const int r = (S - 1) / 2;
    const int r0 = std::max(0, i.row - r);
    const int r1 = std::min(height - 1, i.row + r);
    const int c0 = std::max(0, i.col - r);
    const int c1 = std::min(width - 1, i.col + r);
    std::vector<PixelIndex> out;
    out.reserve(static_cast<std::size_t>(r1 - r0 + 1) * (c1 - c0 + 1));
    for (int row = r0; row <= r1; ++row)
        for (int col = c0; col <= c1; ++col)
            out.push_back(PixelIndex{row, col});
    return out;
}

} // namespace nlem
