#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "nlem/errors.hpp"
#include "nlem/geometric_median.hpp"
#include "nlem/image.hpp"
#include "nlem/parallel.hpp"

namespace nlem {

enum class DenoiseMethod { nlm, nlem };

struct DenoiseParams {
    int search_window = 21;   // S
    int patch_size = 7;       // k
    double lambda = 10.0;     // smoothing factor, h = lambda * sigma
    double sigma = 0.0;       // noise standard deviation, intensity units
    DenoiseMethod method = DenoiseMethod::nlm;
    double knn_fraction = 1.0;  // < 1 keeps only that fraction of largest weights

    double h() const { return lambda * sigma; }
};

// Per-pixel weights over the search window, in row-major pixel order.
struct WeightProfile {
    std::vector<PixelIndex> neighbors;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

// Aggregate solver behavior over a denoising run.
struct Diagnostics {
    double mean_irls_iterations = 0.0;
    std::size_t nonconverged_pixels = 0;
};

namespace detail {

inline void validate_denoise_params(const DenoiseParams& p, int width, int height) {
    if (p.search_window < 1 || p.search_window % 2 == 0)
        throw invalid_parameter("search window size must be odd and positive");
    require_odd_patch_size(p.patch_size, width, height);
    if (!(p.lambda > 0) || !std::isfinite(p.lambda))
        throw invalid_parameter("lambda must be positive");
    if (!(p.sigma > 0) || !std::isfinite(p.sigma))
        throw invalid_parameter("sigma must be positive to form h = lambda * sigma");
    if (!(p.knn_fraction > 0) || p.knn_fraction > 1)
        throw invalid_parameter("knn fraction must be in (0,1]");
}

inline double squared_distance(const double* a, const double* b, int n) {
    double s = 0;
    for (int c = 0; c < n; ++c) {
        const double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

// All patches of the image, one row of k^2 doubles per pixel, row-major.
class PatchTable {
public:
    PatchTable(const Image& img, int k)
        : width_(img.width()), dim_(k * k),
          data_(static_cast<std::size_t>(img.pixel_count()) * static_cast<std::size_t>(dim_)) {
        const int h = img.height();
        const int w = img.width();
        for (int row = 0; row < h; ++row)
            for (int col = 0; col < w; ++col)
                fill_patch(img, row, col, k,
                           data_.data() + (static_cast<std::size_t>(row) * w + col) * dim_);
    }

    int dim() const { return dim_; }
    const double* patch(int row, int col) const {
        return data_.data() + (static_cast<std::size_t>(row) * width_ + col) * static_cast<std::size_t>(dim_);
    }

private:
    int width_;
    int dim_;
    std::vector<double> data_;
};

// Keeps the m = ceil(fraction * window) largest weights, ties broken in
// favor of earlier row-major pixels, and restores row-major order among
// survivors. window is the pre-truncation search-window size.
inline void truncate_to_knn(std::vector<PixelIndex>& neighbors, std::vector<double>& weights,
                            double fraction, std::size_t window) {
    const std::size_t n = weights.size();
    const std::size_t keep =
        std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(window))));
    if (keep >= n)
        return;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    std::vector<PixelIndex> kept_neighbors;
    std::vector<double> kept_weights;
    kept_neighbors.reserve(keep);
    kept_weights.reserve(keep);
    for (std::size_t idx : order) {
        kept_neighbors.push_back(neighbors[idx]);
        kept_weights.push_back(weights[idx]);
    }
    neighbors = std::move(kept_neighbors);
    weights = std::move(kept_weights);
}

// View over a subset of PatchTable rows, for the median solver.
struct PatchSubsetView {
    const PatchTable* table;
    const PixelIndex* neighbors;
    const double* weights;
    std::size_t count;

    std::size_t size() const { return count; }
    int dimension() const { return table->dim(); }
    const double* point(std::size_t j) const {
        return table->patch(neighbors[j].row, neighbors[j].col);
    }
    double weight(std::size_t j) const { return weights[j]; }
};

// Weights that underflow to exactly zero are dropped so profile weights stay
// in (0,1]; zero terms contribute nothing to any downstream sum.
inline WeightProfile profile_from_table(const PatchTable& table, const Image& img, PixelIndex i,
                                        const DenoiseParams& p) {
    const std::vector<PixelIndex> window = search_window(i, p.search_window, img.width(), img.height());
    WeightProfile wp;
    wp.neighbors.reserve(window.size());
    wp.weights.reserve(window.size());
    const double* center = table.patch(i.row, i.col);
    const double h2 = p.h() * p.h();
    for (const PixelIndex& j : window) {
        const double* other = table.patch(j.row, j.col);
        const double w = std::exp(-squared_distance(center, other, table.dim()) / h2);
        if (w > 0) {
            wp.neighbors.push_back(j);
            wp.weights.push_back(w);
        }
    }
    if (p.knn_fraction < 1.0)
        truncate_to_knn(wp.neighbors, wp.weights, p.knn_fraction, window.size());
    return wp;
}

} // namespace detail

// w = exp(-||Pi - Pj||^2 / h^2), the raw sum of squared differences over all
// k^2 entries (no 1/k^2 normalization).
inline double patch_weight(const Patch& a, const Patch& b, double h) {
    if (a.values.size() != b.values.size())
        throw invalid_input("patch size mismatch");
    if (!(h > 0) || !std::isfinite(h))
        throw invalid_parameter("smoothing parameter h must be positive");
    const double d2 = detail::squared_distance(a.values.data(), b.values.data(),
                                               static_cast<int>(a.values.size()));
    return std::exp(-d2 / (h * h));
}

// Weights over the search window around i (kNN-truncated when knn_fraction
// is below 1). The center pixel always carries weight exactly 1; weights that
// underflow to zero are dropped, keeping every stored weight in (0,1].
inline WeightProfile compute_weights(const Image& img, PixelIndex i, const DenoiseParams& p) {
    detail::validate_denoise_params(p, img.width(), img.height());
    if (!img.in_bounds(i))
        throw invalid_input("pixel index out of bounds");

    const std::vector<PixelIndex> window =
        search_window(i, p.search_window, img.width(), img.height());
    WeightProfile wp;
    wp.neighbors.reserve(window.size());
    wp.weights.reserve(window.size());
    const Patch center = extract_patch(img, i, p.patch_size);
    const double h2 = p.h() * p.h();
    Patch other;
    other.k = p.patch_size;
    other.values.resize(center.values.size());
    for (const PixelIndex& j : window) {
        detail::fill_patch(img, j.row, j.col, p.patch_size, other.values.data());
        const double w = std::exp(-detail::squared_distance(center.values.data(), other.values.data(),
                                                            static_cast<int>(center.values.size())) /
                                  h2);
        if (w > 0) {
            wp.neighbors.push_back(j);
            wp.weights.push_back(w);
        }
    }
    if (p.knn_fraction < 1.0)
        detail::truncate_to_knn(wp.neighbors, wp.weights, p.knn_fraction, window.size());
    return wp;
}

// NLM pixel estimate: weighted average of the neighbor intensities.
inline double denoise_pixel_nlm(const Image& img, PixelIndex, const WeightProfile& wp) {
    if (wp.size() == 0)
        throw degenerate_weights("empty weight profile");
    double num = 0;
    double den = 0;
    for (std::size_t j = 0; j < wp.size(); ++j) {
        num += wp.weights[j] * img.at(wp.neighbors[j]);
        den += wp.weights[j];
    }
    if (den <= 0)
        throw degenerate_weights("all weights are zero");
    return num / den;
}

namespace detail {

struct NlemPixelOutcome {
    double value = 0;
    int iterations = 0;
    bool converged = true;
};

inline NlemPixelOutcome denoise_pixel_nlem_table(const PatchTable& table, const WeightProfile& wp,
                                                 const MedianSolverConfig& cfg) {
    if (wp.size() == 0)
        throw degenerate_weights("empty weight profile");
    const PatchSubsetView view{&table, wp.neighbors.data(), wp.weights.data(), wp.size()};
    const MedianResult median = solve_median(view, cfg);
    NlemPixelOutcome out;
    out.value = median.point[(median.point.size() - 1) / 2];
    out.iterations = median.iterations;
    out.converged = median.converged;
    return out;
}

} // namespace detail

// NLEM pixel estimate: center coordinate of the weighted Euclidean median of
// the neighbor patches. Solver non-convergence is not an error; the best
// iterate's center is returned.
inline double denoise_pixel_nlem(const Image& img, PixelIndex, const WeightProfile& wp,
                                 const MedianSolverConfig& cfg, int patch_size) {
    if (wp.size() == 0)
        throw degenerate_weights("empty weight profile");
    detail::require_odd_patch_size(patch_size, img.width(), img.height());
    WeightedPointSet ps(patch_size * patch_size);
    Patch patch;
    patch.k = patch_size;
    patch.values.resize(static_cast<std::size_t>(patch_size) * patch_size);
    for (std::size_t j = 0; j < wp.size(); ++j) {
        detail::fill_patch(img, wp.neighbors[j].row, wp.neighbors[j].col, patch_size,
                           patch.values.data());
        ps.add(patch.values, wp.weights[j]);
    }
    const MedianResult median = euclidean_median(ps, cfg);
    return median.point[(median.point.size() - 1) / 2];
}

// Full-image NLM / NLEM pipeline. Pixels are processed independently (and
// possibly concurrently); the output is bitwise identical for any worker
// count. method = nlm ignores the solver config.
inline std::pair<Image, Diagnostics> denoise_image(const Image& img, const DenoiseParams& p,
                                                   const MedianSolverConfig& cfg = {}) {
    detail::validate_denoise_params(p, img.width(), img.height());
    if (p.method == DenoiseMethod::nlem)
        detail::validate_median_config(cfg);

    const detail::PatchTable table(img, p.patch_size);
    const int width = img.width();
    const std::size_t pixels = img.pixel_count();
    std::vector<double> out(pixels);

    const int workers = parallel::worker_count(pixels);
    std::vector<long long> iteration_sums(static_cast<std::size_t>(workers), 0);
    std::vector<std::size_t> nonconverged(static_cast<std::size_t>(workers), 0);

    parallel::for_blocks(pixels, workers, [&](std::size_t begin, std::size_t end, int worker) {
        for (std::size_t n = begin; n < end; ++n) {
            const PixelIndex i{static_cast<int>(n / static_cast<std::size_t>(width)),
                               static_cast<int>(n % static_cast<std::size_t>(width))};
            const WeightProfile wp = detail::profile_from_table(table, img, i, p);
            if (p.method == DenoiseMethod::nlm) {
                out[n] = denoise_pixel_nlm(img, i, wp);
            } else {
                const auto pixel = detail::denoise_pixel_nlem_table(table, wp, cfg);
                out[n] = pixel.value;
                iteration_sums[static_cast<std::size_t>(worker)] += pixel.iterations;
                if (!pixel.converged)
                    ++nonconverged[static_cast<std::size_t>(worker)];
            }
        }
    });

    Diagnostics diag;
    if (p.method == DenoiseMethod::nlem) {
        long long total_iterations = 0;
        for (long long s : iteration_sums)
            total_iterations += s;
        for (std::size_t c : nonconverged)
            diag.nonconverged_pixels += c;
        diag.mean_irls_iterations =
            static_cast<double>(total_iterations) / static_cast<double>(pixels);
    }
    return {Image(img.width(), img.height(), std::move(out)), diag};
}

} // namespace nlem
