#pragma once

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlem/denoise.hpp"
#include "nlem/errors.hpp"
#include "nlem/experiment.hpp"
#include "nlem/metrics.hpp"
#include "nlem/noise.hpp"
#include "nlem/pgm.hpp"
#include "nlem/synth.hpp"

namespace nlem::cli {

namespace detail {

inline DenoiseMethod parse_method(const std::string& name) {
    if (name == "nlm") return DenoiseMethod::nlm;
    if (name == "nlem") return DenoiseMethod::nlem;
    throw CLI::ValidationError("--method", "must be nlm or nlem");
}

inline MedianAlgorithm parse_solver(const std::string& name) {
    if (name == "weiszfeld") return MedianAlgorithm::weiszfeld;
    if (name == "irls") return MedianAlgorithm::irls_regularized;
    throw CLI::ValidationError("--solver", "must be weiszfeld or irls");
}

inline Image load_source_image(const std::string& kind, const std::string& in_path, int size,
                               int square, int ring_width) {
    if (!in_path.empty())
        return read_pgm(in_path);
    if (kind == "checker")
        return make_checker(size, square);
    if (kind == "circles")
        return make_circles(size, ring_width);
    throw invalid_parameter("image kind must be checker or circles");
}

} // namespace detail

// Subcommands: synth, addnoise, denoise, metrics, experiment, edge1d.
// Exit codes: 0 success, 1 usage error, 2 I/O or file-format error.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"Non-Local Means / Non-Local Euclidean Medians grayscale denoising"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic test image");
    std::string synth_kind = "checker";
    int synth_size = 256, synth_square = 32, synth_ring = 16;
    std::string synth_out;
    synth->add_option("--kind", synth_kind, "checker or circles")->capture_default_str();
    synth->add_option("--size", synth_size, "image side in pixels")->capture_default_str();
    synth->add_option("--square", synth_square, "checker square side")->capture_default_str();
    synth->add_option("--ring-width", synth_ring, "circles ring width")->capture_default_str();
    synth->add_option("--out", synth_out, "output PGM path")->required();

    // addnoise
    auto* addnoise = app.add_subcommand("addnoise", "Add seeded white Gaussian noise");
    std::string an_in, an_out;
    double an_sigma = 0;
    std::uint64_t an_seed = 0;
    addnoise->add_option("--in", an_in, "input PGM")->required();
    addnoise->add_option("--sigma", an_sigma, "noise standard deviation")->required();
    addnoise->add_option("--seed", an_seed, "RNG seed")->capture_default_str();
    addnoise->add_option("--out", an_out, "output PGM path")->required();

    // denoise
    auto* denoise = app.add_subcommand("denoise", "Denoise an image with NLM or NLEM");
    std::string dn_in, dn_out, dn_method = "nlm", dn_solver = "irls";
    double dn_sigma = -1, dn_lambda = 10.0, dn_knn = 1.0;
    int dn_search = 21, dn_patch = 7;
    denoise->add_option("--in", dn_in, "input PGM")->required();
    denoise->add_option("--out", dn_out, "output PGM path")->required();
    denoise->add_option("--method", dn_method, "nlm or nlem")->capture_default_str();
    denoise->add_option("--sigma", dn_sigma, "noise sigma (estimated when omitted)");
    denoise->add_option("--search", dn_search, "search window side S")->capture_default_str();
    denoise->add_option("--patch", dn_patch, "patch side k")->capture_default_str();
    denoise->add_option("--lambda", dn_lambda, "smoothing factor, h = lambda*sigma")->capture_default_str();
    denoise->add_option("--knn", dn_knn, "fraction of largest weights kept")->capture_default_str();
    denoise->add_option("--solver", dn_solver, "weiszfeld or irls")->capture_default_str();

    // metrics
    auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM of a test image against a reference");
    std::string mt_ref, mt_test;
    metrics->add_option("--ref", mt_ref, "reference PGM")->required();
    metrics->add_option("--test", mt_test, "test PGM")->required();

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Multi-trial denoising experiment with CSV report");
    std::string ex_image = "checker", ex_in, ex_outdir, ex_solver = "irls";
    std::vector<double> ex_sigmas;
    std::vector<std::string> ex_methods = {"nlm", "nlem"};
    int ex_trials = 10, ex_size = 256, ex_square = 32, ex_ring = 16, ex_search = 21, ex_patch = 7;
    double ex_lambda = 10.0, ex_knn = 1.0, ex_threshold = 10.0;
    std::uint64_t ex_seed = 0;
    bool ex_save_images = false, ex_no_timing = false;
    experiment->add_option("--image", ex_image, "checker or circles")->capture_default_str();
    experiment->add_option("--in", ex_in, "PGM file used instead of a synthetic image");
    experiment->add_option("--sigma", ex_sigmas, "noise levels (repeatable)")->required();
    experiment->add_option("--methods", ex_methods, "methods to run")->capture_default_str();
    experiment->add_option("--trials", ex_trials, "noise realizations per sigma")->capture_default_str();
    experiment->add_option("--seed", ex_seed, "master seed")->capture_default_str();
    experiment->add_option("--size", ex_size, "synthetic image side")->capture_default_str();
    experiment->add_option("--square", ex_square, "checker square side")->capture_default_str();
    experiment->add_option("--ring-width", ex_ring, "circles ring width")->capture_default_str();
    experiment->add_option("--search", ex_search, "search window side S")->capture_default_str();
    experiment->add_option("--patch", ex_patch, "patch side k")->capture_default_str();
    experiment->add_option("--lambda", ex_lambda, "smoothing factor")->capture_default_str();
    experiment->add_option("--knn", ex_knn, "fraction of largest weights kept")->capture_default_str();
    experiment->add_option("--solver", ex_solver, "weiszfeld or irls")->capture_default_str();
    experiment->add_option("--threshold", ex_threshold, "improvement-map threshold")->capture_default_str();
    experiment->add_option("--outdir", ex_outdir, "directory for report.csv and images");
    experiment->add_flag("--save-images", ex_save_images, "write denoised/method-noise/improvement images");
    experiment->add_flag("--no-timing", ex_no_timing, "report wall_time_s as 0 for reproducible CSVs");

    // edge1d
    auto* edge1d = app.add_subcommand("edge1d", "One-dimensional noisy edge study");
    int e_trials = 10, e_samples = 46, e_edge = 30, e_offset = 3, e_search = 41, e_patch = 3;
    double e_sigma = 0.2, e_lambda = 10.0;
    std::uint64_t e_seed = 42;
    edge1d->add_option("--trials", e_trials, "trials")->capture_default_str();
    edge1d->add_option("--seed", e_seed, "master seed")->capture_default_str();
    edge1d->add_option("--sigma", e_sigma, "noise sigma")->capture_default_str();
    edge1d->add_option("--samples", e_samples, "signal length")->capture_default_str();
    edge1d->add_option("--edge-pos", e_edge, "edge position")->capture_default_str();
    edge1d->add_option("--offset", e_offset, "marked point offset right of the edge")->capture_default_str();
    edge1d->add_option("--search", e_search, "search window S")->capture_default_str();
    edge1d->add_option("--patch", e_patch, "patch size k")->capture_default_str();
    edge1d->add_option("--lambda", e_lambda, "smoothing factor")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*synth) {
            write_pgm(detail::load_source_image(synth_kind, "", synth_size, synth_square, synth_ring),
                      synth_out);
        } else if (*addnoise) {
            write_pgm(add_noise(read_pgm(an_in), NoiseSpec{an_sigma, an_seed}), an_out);
        } else if (*denoise) {
            const Image noisy = read_pgm(dn_in);
            DenoiseParams params;
            params.search_window = dn_search;
            params.patch_size = dn_patch;
            params.lambda = dn_lambda;
            params.method = detail::parse_method(dn_method);
            params.knn_fraction = dn_knn;
            params.sigma = dn_sigma > 0 ? dn_sigma : estimate_sigma(noisy);
            MedianSolverConfig solver;
            solver.algorithm = detail::parse_solver(dn_solver);
            auto [out, diag] = denoise_image(noisy, params, solver);
            write_pgm(out, dn_out);
            if (params.method == DenoiseMethod::nlem)
                std::fprintf(stderr, "mean_iters=%.3f nonconverged=%zu\n",
                             diag.mean_irls_iterations, diag.nonconverged_pixels);
        } else if (*metrics) {
            const QualityReport report = quality(read_pgm(mt_ref), read_pgm(mt_test));
            std::printf("%.6f,%.6f\n", report.psnr, report.ssim);
        } else if (*experiment) {
            ExperimentConfig cfg;
            cfg.image_name = ex_in.empty() ? ex_image : ex_in;
            cfg.clean = detail::load_source_image(ex_image, ex_in, ex_size, ex_square, ex_ring);
            cfg.sigmas = ex_sigmas;
            cfg.methods.clear();
            for (const std::string& m : ex_methods)
                cfg.methods.push_back(detail::parse_method(m));
            cfg.trials = ex_trials;
            cfg.base_params.search_window = ex_search;
            cfg.base_params.patch_size = ex_patch;
            cfg.base_params.lambda = ex_lambda;
            cfg.base_params.knn_fraction = ex_knn;
            cfg.solver.algorithm = detail::parse_solver(ex_solver);
            cfg.master_seed = ex_seed;
            cfg.output_dir = ex_outdir;
            cfg.save_images = ex_save_images;
            cfg.improvement_threshold = ex_threshold;
            cfg.record_timing = !ex_no_timing;
            const ExperimentReport report = run_table_experiment(cfg);
            std::fputs(report.to_csv().c_str(), stdout);
        } else if (*edge1d) {
            Edge1DConfig cfg;
            cfg.trials = e_trials;
            cfg.seed = e_seed;
            cfg.sigma = e_sigma;
            cfg.samples = e_samples;
            cfg.edge_position = e_edge;
            cfg.offset = e_offset;
            cfg.search_window = e_search;
            cfg.patch_size = e_patch;
            cfg.lambda = e_lambda;
            const Edge1DResult result = run_edge1d_experiment(cfg);
            std::printf("nlm_mean,nlem_mean\n%.6f,%.6f\n", result.nlm_mean, result.nlem_mean);
        }
    } catch (const format_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

inline int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace nlem::cli
