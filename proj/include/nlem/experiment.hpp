#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "nlem/denoise.hpp"
#include "nlem/errors.hpp"
#include "nlem/image.hpp"
#include "nlem/metrics.hpp"
#include "nlem/noise.hpp"
#include "nlem/pgm.hpp"
#include "nlem/rng.hpp"
#include "nlem/synth.hpp"

namespace nlem {

struct ExperimentConfig {
    std::string image_name;  // label used in the CSV
    Image clean;
    std::vector<double> sigmas;
    std::vector<DenoiseMethod> methods = {DenoiseMethod::nlm, DenoiseMethod::nlem};
    int trials = 10;
    DenoiseParams base_params;  // sigma and method are filled per run
    MedianSolverConfig solver;
    std::uint64_t master_seed = 0;
    std::string output_dir;           // empty: no files written
    bool save_images = false;         // denoised / method-noise / improvement maps
    double improvement_threshold = 10.0;
    bool record_timing = true;        // false pins wall_time_s to 0 for reproducible output
};

struct ExperimentRow {
    std::string image;
    std::string method;
    double sigma = 0;
    double psnr_mean = 0;
    double psnr_std = 0;
    double ssim_mean = 0;
    double ssim_std = 0;
    double mean_iters = 0;
    double wall_time_s = 0;
};

// Per-trial measurements backing a row, kept for tests and plots.
struct TrialRecord {
    std::string method;
    double sigma = 0;
    int trial = 0;
    double psnr = 0;
    double ssim = 0;
    double mean_iters = 0;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::vector<TrialRecord> trial_records;

    std::string to_csv() const {
        std::string csv = "image,method,sigma,psnr_mean,psnr_std,ssim_mean,ssim_std,mean_iters,wall_time_s\n";
        char line[512];
        for (const ExperimentRow& r : rows) {
            std::snprintf(line, sizeof(line), "%s,%s,%g,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                          r.image.c_str(), r.method.c_str(), r.sigma, r.psnr_mean, r.psnr_std,
                          r.ssim_mean, r.ssim_std, r.mean_iters, r.wall_time_s);
            csv += line;
        }
        return csv;
    }
};

inline const char* method_name(DenoiseMethod m) {
    return m == DenoiseMethod::nlm ? "nlm" : "nlem";
}

namespace detail {

struct RunningStats {
    double sum = 0;
    double sum_sq = 0;
    int count = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    double mean() const { return sum / count; }
    // sample standard deviation; 0 for a single observation
    double stddev() const {
        if (count < 2) return 0;
        const double m = mean();
        const double var = (sum_sq - static_cast<double>(count) * m * m) / (count - 1);
        return var > 0 ? std::sqrt(var) : 0.0;
    }
};

inline std::string sigma_tag(double sigma) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", sigma);
    return buf;
}

} // namespace detail

// Runs every method on the same noisy realization for each (sigma, trial)
// pair, with the per-trial seed derived from the master seed, and aggregates
// PSNR/SSIM statistics. Writes report.csv plus optional images when an
// output directory is configured.
inline ExperimentReport run_table_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1)
        throw invalid_parameter("experiment needs at least one trial");
    if (cfg.sigmas.empty())
        throw invalid_parameter("experiment needs at least one sigma");
    for (double s : cfg.sigmas)
        if (!(s > 0))
            throw invalid_parameter("experiment sigma values must be positive");
    if (cfg.methods.empty())
        throw invalid_parameter("experiment needs at least one method");
    if (cfg.clean.empty())
        throw invalid_input("experiment needs a clean source image");

    const bool writing = !cfg.output_dir.empty();
    if (writing)
        std::filesystem::create_directories(cfg.output_dir);
    const std::filesystem::path out_dir(cfg.output_dir);

    const std::string variant_suffix = cfg.base_params.knn_fraction < 1.0 ? "-knn" : "";

    ExperimentReport report;
    for (double sigma : cfg.sigmas) {
        std::vector<detail::RunningStats> psnr_stats(cfg.methods.size());
        std::vector<detail::RunningStats> ssim_stats(cfg.methods.size());
        std::vector<detail::RunningStats> iter_stats(cfg.methods.size());
        std::vector<double> seconds(cfg.methods.size(), 0.0);

        for (int trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t trial_seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial));
            const Image noisy = add_noise(cfg.clean, NoiseSpec{sigma, trial_seed});

            Image nlm_result;
            Image nlem_result;
            for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                DenoiseParams params = cfg.base_params;
                params.sigma = sigma;
                params.method = cfg.methods[m];

                const auto start = std::chrono::steady_clock::now();
                auto [denoised, diag] = denoise_image(noisy, params, cfg.solver);
                const auto stop = std::chrono::steady_clock::now();
                seconds[m] += std::chrono::duration<double>(stop - start).count();

                const double psnr_v = psnr(cfg.clean, denoised);
                const double ssim_v = ssim(cfg.clean, denoised);
                psnr_stats[m].add(psnr_v);
                ssim_stats[m].add(ssim_v);
                iter_stats[m].add(diag.mean_irls_iterations);
                report.trial_records.push_back(TrialRecord{
                    std::string(method_name(cfg.methods[m])) + variant_suffix, sigma, trial,
                    psnr_v, ssim_v, diag.mean_irls_iterations});

                if (cfg.methods[m] == DenoiseMethod::nlm)
                    nlm_result = denoised;
                else
                    nlem_result = denoised;

                if (writing && cfg.save_images) {
                    const std::string stem = cfg.image_name + "_" + method_name(cfg.methods[m]) +
                                             variant_suffix + "_s" + detail::sigma_tag(sigma) +
                                             "_t" + std::to_string(trial);
                    write_pgm(denoised, (out_dir / (stem + "_denoised.pgm")).string());
                    write_pgm(rescale_for_display(method_noise(noisy, denoised)),
                              (out_dir / (stem + "_method_noise.pgm")).string());
                }
            }

            if (writing && cfg.save_images && !nlm_result.empty() && !nlem_result.empty()) {
                const ImprovementMap map =
                    improvement_map(cfg.clean, nlm_result, nlem_result, cfg.improvement_threshold);
                const std::string stem = cfg.image_name + "_improvement_s" +
                                         detail::sigma_tag(sigma) + "_t" + std::to_string(trial);
                write_pgm(map.to_image(), (out_dir / (stem + ".pgm")).string());
            }
        }

        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            ExperimentRow row;
            row.image = cfg.image_name;
            row.method = std::string(method_name(cfg.methods[m])) + variant_suffix;
            row.sigma = sigma;
            row.psnr_mean = psnr_stats[m].mean();
            row.psnr_std = psnr_stats[m].stddev();
            row.ssim_mean = ssim_stats[m].mean();
            row.ssim_std = ssim_stats[m].stddev();
            row.mean_iters = iter_stats[m].mean();
            row.wall_time_s = cfg.record_timing ? seconds[m] / cfg.trials : 0.0;
            report.rows.push_back(std::move(row));
        }
    }

    if (writing) {
        const std::string path = (out_dir / "report.csv").string();
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw io_error("cannot open for writing: " + path);
        out << report.to_csv();
        if (!out)
            throw io_error("write failure: " + path);
    }
    return report;
}

struct Edge1DConfig {
    int trials = 10;
    std::uint64_t seed = 42;
    double sigma = 0.2;
    int samples = 46;
    int edge_position = 30;
    int offset = 3;          // marked point sits this many samples right of the edge
    int search_window = 41;  // S
    int patch_size = 3;      // k
    double lambda = 10.0;
    MedianSolverConfig solver;
};

struct Edge1DResult {
    double nlm_mean = 0;
    double nlem_mean = 0;
    std::vector<double> nlm_values;
    std::vector<double> nlem_values;
};

// One-dimensional edge study: denoise a marked point a few samples right of
// a noisy unit step with both estimators, averaged over seeded trials.
inline Edge1DResult run_edge1d_experiment(const Edge1DConfig& cfg) {
    if (cfg.trials < 1)
        throw invalid_parameter("edge experiment needs at least one trial");
    if (cfg.patch_size < 1 || cfg.patch_size % 2 == 0)
        throw invalid_parameter("patch size must be odd and positive");
    if (cfg.search_window < 1 || cfg.search_window % 2 == 0)
        throw invalid_parameter("search window size must be odd and positive");
    if (cfg.sigma < 0)
        throw invalid_parameter("sigma must be nonnegative");

    const EdgeSignal1D clean = make_edge_1d(cfg.samples, cfg.edge_position);
    const int n = cfg.samples;
    const int point = cfg.edge_position + cfg.offset;
    if (point < 0 || point >= n)
        throw invalid_parameter("marked point falls outside the signal");

    const int patch_radius = (cfg.patch_size - 1) / 2;
    const int window_radius = (cfg.search_window - 1) / 2;
    const double h = cfg.lambda * cfg.sigma;
    const double h2 = h * h;

    auto patch_at = [&](const std::vector<double>& signal, int center, std::vector<double>& out) {
        out.clear();
        for (int t = -patch_radius; t <= patch_radius; ++t)
            out.push_back(signal[static_cast<std::size_t>(mirror_index(center + t, n))]);
    };

    Edge1DResult result;
    std::vector<double> center_patch;
    std::vector<double> other_patch;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
        const std::vector<double> noisy = add_noise(clean.samples, NoiseSpec{cfg.sigma, trial_seed});

        patch_at(noisy, point, center_patch);
        const int j0 = std::max(0, point - window_radius);
        const int j1 = std::min(n - 1, point + window_radius);

        WeightedPointSet patches(cfg.patch_size);
        double nlm_num = 0;
        double nlm_den = 0;
        for (int j = j0; j <= j1; ++j) {
            patch_at(noisy, j, other_patch);
            double ssd = 0;
            for (int t = 0; t < cfg.patch_size; ++t) {
                const double d = center_patch[static_cast<std::size_t>(t)] -
                                 other_patch[static_cast<std::size_t>(t)];
                ssd += d * d;
            }
            // sigma = 0 takes the h -> 0 limit: only exact patch matches count
            const double w = h2 > 0 ? std::exp(-ssd / h2) : (ssd == 0 ? 1.0 : 0.0);
            nlm_num += w * noisy[static_cast<std::size_t>(j)];
            nlm_den += w;
            patches.add(other_patch, w);
        }

        const double nlm_value = nlm_num / nlm_den;
        const MedianResult median = euclidean_median(patches, cfg.solver);
        const double nlem_value = median.point[static_cast<std::size_t>(patch_radius)];

        result.nlm_values.push_back(nlm_value);
        result.nlem_values.push_back(nlem_value);
        result.nlm_mean += nlm_value;
        result.nlem_mean += nlem_value;
    }
    result.nlm_mean /= cfg.trials;
    result.nlem_mean /= cfg.trials;
    return result;
}

} // namespace nlem
