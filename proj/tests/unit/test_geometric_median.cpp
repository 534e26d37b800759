#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "nlem/geometric_median.hpp"
#include "nlem/rng.hpp"
#include "support/grid_oracle.hpp"

using namespace nlem;

namespace {

WeightedPointSet make_set(const std::vector<std::vector<double>>& points,
                          const std::vector<double>& weights) {
    WeightedPointSet ps(static_cast<int>(points.front().size()));
    for (std::size_t j = 0; j < points.size(); ++j)
        ps.add(points[j], weights[j]);
    return ps;
}

WeightedPointSet random_set(SplitMix64& rng, std::size_t max_points = 12) {
    const std::size_t n = 2 + rng.next() % (max_points - 1);
    WeightedPointSet ps(2);
    for (std::size_t j = 0; j < n; ++j) {
        const std::vector<double> p = {rng.next_unit(), rng.next_unit()};
        ps.add(p, 0.1 + 0.9 * rng.next_unit());
    }
    return ps;
}

MedianSolverConfig weiszfeld_config() {
    MedianSolverConfig cfg;
    cfg.algorithm = MedianAlgorithm::weiszfeld;
    return cfg;
}

// convergence into a data-point optimum is sublinear, so tests that compare
// against the oracle give the solver a large iteration budget
MedianSolverConfig converged(MedianAlgorithm algorithm) {
    MedianSolverConfig cfg;
    cfg.algorithm = algorithm;
    cfg.max_iterations = 2000;
    return cfg;
}

} // namespace

TEST_CASE("weighted point set validates input") {
    WeightedPointSet ps(2);
    CHECK_THROWS_AS(ps.add(std::vector<double>{1.0}, 1.0), invalid_input);
    CHECK_THROWS_AS(ps.add(std::vector<double>{1.0, 2.0}, -0.5), invalid_input);
    CHECK_THROWS_AS(ps.add(std::vector<double>{1.0, std::nan("")}, 1.0), invalid_input);
    CHECK_THROWS_AS(WeightedPointSet(0), invalid_parameter);
}

TEST_CASE("weighted_mean basics") {
    CHECK(weighted_mean(make_set({{3, 4}}, {1})) == std::vector<double>{3, 4});
    CHECK(weighted_mean(make_set({{0, 0}, {1, 1}}, {1, 1})) == std::vector<double>{0.5, 0.5});
    CHECK(weighted_mean(make_set({{0, 0}, {1, 0}}, {1, 3})) == std::vector<double>{0.75, 0});
    CHECK_THROWS_AS(weighted_mean(make_set({{1, 2}, {3, 4}}, {0, 0})), degenerate_weights);
}

TEST_CASE("median_cost basics") {
    const auto single = make_set({{7, -2}}, {1});
    CHECK(median_cost(single, std::vector<double>{7, -2}) == 0.0);

    const auto pair = make_set({{0, 0}, {3, 4}}, {1, 1});
    CHECK(median_cost(pair, std::vector<double>{0, 0}) == Approx(5.0));

    CHECK_THROWS_AS(median_cost(pair, std::vector<double>{1, 2, 3}), invalid_input);
}

TEST_CASE("median of a single point is that point") {
    for (auto algorithm : {MedianAlgorithm::weiszfeld, MedianAlgorithm::irls_regularized}) {
        MedianSolverConfig cfg;
        cfg.algorithm = algorithm;
        const MedianResult r = euclidean_median(make_set({{7, -2}}, {1}), cfg);
        CHECK(r.point == std::vector<double>{7, -2});
        CHECK(r.final_cost == 0.0);
        CHECK(r.converged);
    }
}

TEST_CASE("median of collinear points is the middle point") {
    const auto ps = make_set({{0, 0}, {1, 0}, {5, 0}}, {1, 1, 1});
    for (auto algorithm : {MedianAlgorithm::weiszfeld, MedianAlgorithm::irls_regularized}) {
        MedianSolverConfig cfg;
        cfg.algorithm = algorithm;
        const MedianResult r = euclidean_median(ps, cfg);
        CHECK(r.point[0] == Approx(1.0).margin(1e-5));
        CHECK(r.point[1] == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("median of the unit square corners is the center") {
    const auto ps = make_set({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {1, 1, 1, 1});
    const MedianResult r = euclidean_median(ps);
    CHECK(r.point[0] == Approx(0.5).margin(1e-9));
    CHECK(r.point[1] == Approx(0.5).margin(1e-9));
}

TEST_CASE("degenerate weights are rejected") {
    CHECK_THROWS_AS(euclidean_median(make_set({{0, 0}, {1, 1}}, {0, 0})), degenerate_weights);
    WeightedPointSet empty(2);
    CHECK_THROWS_AS(euclidean_median(empty), degenerate_weights);
    CHECK_THROWS_AS(weighted_mean(empty), degenerate_weights);
}

TEST_CASE("solver config is validated") {
    const auto ps = make_set({{0, 0}, {1, 1}}, {1, 1});
    MedianSolverConfig cfg;
    cfg.step_tolerance = 0;
    CHECK_THROWS_AS(euclidean_median(ps, cfg), invalid_parameter);
    cfg = MedianSolverConfig{};
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(euclidean_median(ps, cfg), invalid_parameter);
    cfg = MedianSolverConfig{};
    cfg.bias_shrink = 1.0;
    CHECK_THROWS_AS(euclidean_median(ps, cfg), invalid_parameter);
    cfg = MedianSolverConfig{};
    cfg.snap_epsilon = -1;
    CHECK_THROWS_AS(euclidean_median(ps, cfg), invalid_parameter);
}

TEST_CASE("a dominant weight snaps to its point exactly") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        WeightedPointSet ps(2);
        double others = 0;
        for (int j = 0; j < 5; ++j) {
            const double w = 0.1 + rng.next_unit();
            others += w;
            ps.add(std::vector<double>{rng.next_unit() * 10, rng.next_unit() * 10}, w);
        }
        const std::vector<double> heavy = {rng.next_unit() * 10, rng.next_unit() * 10};
        ps.add(heavy, others * 1.01);
        for (auto algorithm : {MedianAlgorithm::weiszfeld, MedianAlgorithm::irls_regularized}) {
            MedianSolverConfig cfg;
            cfg.algorithm = algorithm;
            const MedianResult r = euclidean_median(ps, cfg);
            CHECK(r.point == heavy);
            CHECK(r.converged);
        }
    }
}

TEST_CASE("weiszfeld resumes from a non-optimal data point") {
    // The weighted mean lands exactly on (0,0), which is not the median.
    const auto ps = make_set({{0, 0}, {-1, 3}, {1, 3}, {0, -2}}, {1, 1, 1, 3});
    const MedianResult r = euclidean_median(ps, converged(MedianAlgorithm::weiszfeld));
    const auto expected = nlem_test::grid_median_2d(ps);
    CHECK(r.point[0] == Approx(expected[0]).margin(1e-2));
    CHECK(r.point[1] == Approx(expected[1]).margin(1e-2));
    CHECK(median_cost(ps, r.point) <= nlem_test::oracle_cost(ps, 0, 0));
}

TEST_CASE("weiszfeld matches the grid oracle on random instances") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const WeightedPointSet ps = random_set(rng);
        const auto expected = nlem_test::grid_median_2d(ps);
        for (auto algorithm : {MedianAlgorithm::weiszfeld, MedianAlgorithm::irls_regularized}) {
            const MedianResult r = euclidean_median(ps, converged(algorithm));
            CHECK(r.point[0] == Approx(expected[0]).margin(1e-2));
            CHECK(r.point[1] == Approx(expected[1]).margin(1e-2));
            CHECK(r.final_cost == Approx(median_cost(ps, r.point)).epsilon(1e-12));
        }
    }
}

TEST_CASE("weiszfeld cost descends monotonically between non-snap iterates") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const WeightedPointSet ps = random_set(rng);
        MedianTrace trace;
        euclidean_median(ps, weiszfeld_config(), &trace);
        for (std::size_t k = 1; k < trace.costs.size(); ++k) {
            if (trace.snapped[k]) continue;
            CHECK(trace.costs[k] <= trace.costs[k - 1] * (1 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("every iterate stays inside the hull box") {
    SplitMix64 rng(321);
    for (int trial = 0; trial < 25; ++trial) {
        const WeightedPointSet ps = random_set(rng);
        double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
        for (std::size_t j = 0; j < ps.size(); ++j)
            for (int c = 0; c < 2; ++c) {
                lo[c] = std::min(lo[c], ps.point(j)[c]);
                hi[c] = std::max(hi[c], ps.point(j)[c]);
            }
        for (auto algorithm : {MedianAlgorithm::weiszfeld, MedianAlgorithm::irls_regularized}) {
            MedianSolverConfig cfg;
            cfg.algorithm = algorithm;
            MedianTrace trace;
            euclidean_median(ps, cfg, &trace);
            for (const auto& x : trace.iterates)
                for (int c = 0; c < 2; ++c) {
                    CHECK(x[static_cast<std::size_t>(c)] >= lo[c]);
                    CHECK(x[static_cast<std::size_t>(c)] <= hi[c]);
                }
        }
    }
}

TEST_CASE("median is equivariant under translation, rotation, and scale") {
    SplitMix64 rng(456);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> points;
        std::vector<double> weights;
        const std::size_t n = 3 + rng.next() % 8;
        for (std::size_t j = 0; j < n; ++j) {
            points.push_back({rng.next_unit(), rng.next_unit()});
            weights.push_back(0.1 + rng.next_unit());
        }
        const MedianResult base =
            euclidean_median(make_set(points, weights), converged(MedianAlgorithm::irls_regularized));

        const double angle = rng.next_unit() * 6.28;
        const double ca = std::cos(angle), sa = std::sin(angle);
        const double tx = rng.next_unit() * 5 - 2.5, ty = rng.next_unit() * 5 - 2.5;
        const double scale = 0.5 + 2 * rng.next_unit();

        std::vector<std::vector<double>> mapped;
        for (const auto& p : points)
            mapped.push_back({scale * (ca * p[0] - sa * p[1]) + tx,
                              scale * (sa * p[0] + ca * p[1]) + ty});
        const MedianResult moved =
            euclidean_median(make_set(mapped, weights), converged(MedianAlgorithm::irls_regularized));

        const double ex = scale * (ca * base.point[0] - sa * base.point[1]) + tx;
        const double ey = scale * (sa * base.point[0] + ca * base.point[1]) + ty;
        CHECK(moved.point[0] == Approx(ex).margin(2e-4));
        CHECK(moved.point[1] == Approx(ey).margin(2e-4));
    }
}

TEST_CASE("scaling all weights by a power of two changes nothing bitwise") {
    SplitMix64 rng(789);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> points;
        std::vector<double> weights;
        const std::size_t n = 3 + rng.next() % 8;
        for (std::size_t j = 0; j < n; ++j) {
            points.push_back({rng.next_unit(), rng.next_unit()});
            weights.push_back(0.1 + rng.next_unit());
        }
        std::vector<double> scaled = weights;
        for (double& w : scaled)
            w *= 64.0;
        for (auto algorithm : {MedianAlgorithm::weiszfeld, MedianAlgorithm::irls_regularized}) {
            MedianSolverConfig cfg;
            cfg.algorithm = algorithm;
            const MedianResult a = euclidean_median(make_set(points, weights), cfg);
            const MedianResult b = euclidean_median(make_set(points, scaled), cfg);
            CHECK(a.point == b.point);
            CHECK(a.iterations == b.iterations);
        }
    }
}

TEST_CASE("cost at the weighted mean dominates cost at the median") {
    SplitMix64 rng(654);
    for (int trial = 0; trial < 20; ++trial) {
        const WeightedPointSet ps = random_set(rng);
        const MedianResult r = euclidean_median(ps);
        CHECK(median_cost(ps, weighted_mean(ps)) >= r.final_cost - 1e-9);
    }
}
