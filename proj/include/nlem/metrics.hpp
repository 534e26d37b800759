#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "nlem/errors.hpp"
#include "nlem/image.hpp"

namespace nlem {

struct QualityReport {
    double psnr = 0;
    double ssim = 0;
};

namespace detail {

inline void require_same_size(const Image& a, const Image& b) {
    if (!a.same_size(b))
        throw invalid_input("image dimensions do not match");
}

} // namespace detail

inline double mse(const Image& a, const Image& b) {
    detail::require_same_size(a, b);
    double sum = 0;
    const auto& x = a.data();
    const auto& y = b.data();
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double d = x[n] - y[n];
        sum += d * d;
    }
    return sum / static_cast<double>(x.size());
}

// 10 * log10(255^2 / MSE), +inf when the images are identical.
inline double psnr(const Image& reference, const Image& test) {
    const double m = mse(reference, test);
    if (m == 0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

namespace detail {

inline std::vector<double> ssim_gaussian_kernel() {
    std::vector<double> kernel(11);
    const double sigma = 1.5;
    double sum = 0;
    for (int t = 0; t < 11; ++t) {
        kernel[static_cast<std::size_t>(t)] = std::exp(-((t - 5) * (t - 5)) / (2.0 * sigma * sigma));
        sum += kernel[static_cast<std::size_t>(t)];
    }
    for (double& k : kernel)
        k /= sum;
    return kernel;
}

// Separable valid-region convolution with an 11-tap kernel:
// (h x w) -> (h-10 x w-10).
inline std::vector<double> convolve_valid_11(const std::vector<double>& field, int h, int w,
                                             const std::vector<double>& kernel) {
    const int wo = w - 10;
    std::vector<double> horizontal(static_cast<std::size_t>(h) * wo);
    for (int row = 0; row < h; ++row) {
        const double* src = field.data() + static_cast<std::size_t>(row) * w;
        double* dst = horizontal.data() + static_cast<std::size_t>(row) * wo;
        for (int col = 0; col < wo; ++col) {
            double s = 0;
            for (int t = 0; t < 11; ++t)
                s += kernel[static_cast<std::size_t>(t)] * src[col + t];
            dst[col] = s;
        }
    }
    const int ho = h - 10;
    std::vector<double> out(static_cast<std::size_t>(ho) * wo);
    for (int row = 0; row < ho; ++row) {
        double* dst = out.data() + static_cast<std::size_t>(row) * wo;
        for (int col = 0; col < wo; ++col) {
            double s = 0;
            for (int t = 0; t < 11; ++t)
                s += kernel[static_cast<std::size_t>(t)] *
                     horizontal[static_cast<std::size_t>(row + t) * wo + col];
            dst[col] = s;
        }
    }
    return out;
}

} // namespace detail

// Mean local SSIM with an 11x11 Gaussian window (std 1.5), C1 = (0.01*255)^2,
// C2 = (0.03*255)^2, averaged over valid (non-padded) window positions.
inline double ssim(const Image& reference, const Image& test) {
    detail::require_same_size(reference, test);
    const int h = reference.height();
    const int w = reference.width();
    if (h < 11 || w < 11)
        throw invalid_parameter("ssim needs images at least 11x11");

    const std::vector<double> kernel = detail::ssim_gaussian_kernel();
    const auto& x = reference.data();
    const auto& y = test.data();
    const std::size_t n = x.size();

    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }

    const auto mu_x = detail::convolve_valid_11(x, h, w, kernel);
    const auto mu_y = detail::convolve_valid_11(y, h, w, kernel);
    const auto m_xx = detail::convolve_valid_11(xx, h, w, kernel);
    const auto m_yy = detail::convolve_valid_11(yy, h, w, kernel);
    const auto m_xy = detail::convolve_valid_11(xy, h, w, kernel);

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    double total = 0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x[i];
        const double my = mu_y[i];
        const double var_x = m_xx[i] - mx * mx;
        const double var_y = m_yy[i] - my * my;
        const double cov = m_xy[i] - mx * my;
        const double numerator = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        const double denominator = (mx * mx + my * my + c1) * (var_x + var_y + c2);
        total += numerator / denominator;
    }
    return total / static_cast<double>(mu_x.size());
}

inline QualityReport quality(const Image& reference, const Image& test) {
    return QualityReport{psnr(reference, test), ssim(reference, test)};
}

// Pixel-wise denoised - noisy difference.
inline Image method_noise(const Image& noisy, const Image& denoised) {
    detail::require_same_size(noisy, denoised);
    std::vector<double> diff(noisy.pixel_count());
    for (std::size_t n = 0; n < diff.size(); ++n)
        diff[n] = denoised.data()[n] - noisy.data()[n];
    return Image(noisy.width(), noisy.height(), std::move(diff));
}

// Affine rescale to [0,255] for display export; a constant image maps to 0.
inline Image rescale_for_display(const Image& img) {
    const auto [lo_it, hi_it] = std::minmax_element(img.data().begin(), img.data().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> out(img.pixel_count(), 0.0);
    if (hi > lo) {
        const double scale = 255.0 / (hi - lo);
        for (std::size_t n = 0; n < out.size(); ++n)
            out[n] = (img.data()[n] - lo) * scale;
    }
    return Image(img.width(), img.height(), std::move(out));
}

// Per-pixel flags marking where one estimate beats another by more than a
// threshold.
struct ImprovementMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> flags;  // 1 = flagged

    std::size_t flag_count() const {
        std::size_t c = 0;
        for (std::uint8_t f : flags)
            c += f;
        return c;
    }

    Image to_image() const {
        std::vector<double> data(flags.size());
        for (std::size_t n = 0; n < flags.size(); ++n)
            data[n] = flags[n] ? 255.0 : 0.0;
        return Image(width, height, std::move(data));
    }
};

// Flags pixel i iff |nlem_i - clean_i| < |nlm_i - clean_i| - threshold.
inline ImprovementMap improvement_map(const Image& clean, const Image& nlm, const Image& nlem,
                                      double threshold = 10.0) {
    detail::require_same_size(clean, nlm);
    detail::require_same_size(clean, nlem);
    ImprovementMap map;
    map.width = clean.width();
    map.height = clean.height();
    map.flags.resize(clean.pixel_count());
    for (std::size_t n = 0; n < map.flags.size(); ++n) {
        const double err_nlm = std::abs(nlm.data()[n] - clean.data()[n]);
        const double err_nlem = std::abs(nlem.data()[n] - clean.data()[n]);
        map.flags[n] = err_nlem < err_nlm - threshold ? 1 : 0;
    }
    return map;
}

} // namespace nlem
