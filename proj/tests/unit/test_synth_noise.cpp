#include <catch2/catch.hpp>

#include <cmath>
#include <map>

#include "nlem/metrics.hpp"
#include "nlem/noise.hpp"
#include "nlem/synth.hpp"

using namespace nlem;

TEST_CASE("checker basics") {
    const Image tiny = make_checker(2, 1);
    CHECK(tiny.data() == std::vector<double>{0, 255, 255, 0});

    CHECK_THROWS_AS(make_checker(10, 3), invalid_parameter);
    CHECK_THROWS_AS(make_checker(0, 1), invalid_parameter);
    CHECK_THROWS_AS(make_checker(8, 0), invalid_parameter);
}

TEST_CASE("checker histogram is two-valued with equal counts") {
    const Image img = make_checker();
    std::map<double, int> histogram;
    for (double v : img.data())
        ++histogram[v];
    REQUIRE(histogram.size() == 2);
    CHECK(histogram.at(0.0) == 32768);
    CHECK(histogram.at(255.0) == 32768);
}

namespace {

int count_black_squares(const Image& img, int square) {
    int black = 0;
    for (int row = 0; row < img.height(); row += square)
        for (int col = 0; col < img.width(); col += square)
            if (img.at(row, col) == 0.0)
                ++black;
    return black;
}

} // namespace

TEST_CASE("checker square counts") {
    // default geometry: 8x8 grid of 32-pixel squares, half of them black
    CHECK(count_black_squares(make_checker(256, 32), 32) == 32);
    // 16-pixel squares give the 16x16 grid with 128 black squares
    CHECK(count_black_squares(make_checker(256, 16), 16) == 128);
}

TEST_CASE("circles basics") {
    const Image all_white = make_circles(4, 100);
    for (double v : all_white.data())
        CHECK(v == 255.0);

    const Image img = make_circles();
    // center pixels sit in the white inner disk
    CHECK(img.at(127, 127) == 255.0);
    CHECK(img.at(128, 128) == 255.0);

    std::map<double, int> histogram;
    for (double v : img.data())
        ++histogram[v];
    CHECK(histogram.size() == 2);

    CHECK_THROWS_AS(make_circles(0, 4), invalid_parameter);
    CHECK_THROWS_AS(make_circles(8, 0), invalid_parameter);
}

TEST_CASE("edge signal basics") {
    const EdgeSignal1D e = make_edge_1d(4, 2);
    CHECK(e.samples == std::vector<double>{0, 0, 1, 1});

    const EdgeSignal1D big = make_edge_1d(100, 50);
    CHECK(big.samples[49] == 0.0);
    CHECK(big.samples[50] == 1.0);
    double sum = 0;
    for (double v : big.samples)
        sum += v;
    CHECK(sum == 50.0);

    CHECK_THROWS_AS(make_edge_1d(10, 0), invalid_parameter);
    CHECK_THROWS_AS(make_edge_1d(10, 10), invalid_parameter);
    CHECK_THROWS_AS(make_edge_1d(1, 0), invalid_parameter);
}

TEST_CASE("noise with sigma zero is the identity") {
    const Image img = make_checker(16, 4);
    const Image out = add_noise(img, NoiseSpec{0.0, 77});
    CHECK(out.data() == img.data());
}

TEST_CASE("noise is reproducible and seed-sensitive") {
    const Image img(32, 32);
    const Image a = add_noise(img, NoiseSpec{10.0, 42});
    const Image b = add_noise(img, NoiseSpec{10.0, 42});
    const Image c = add_noise(img, NoiseSpec{10.0, 43});
    CHECK(a.data() == b.data());
    CHECK(a.data() != c.data());
}

TEST_CASE("noise sample statistics match sigma") {
    // chi-square bounds for 65536 samples put the sample std within [97,103]
    // with overwhelming probability
    const Image zeros(256, 256);
    const Image noisy = add_noise(zeros, NoiseSpec{100.0, 2024});
    double sum = 0, sum_sq = 0;
    for (double v : noisy.data()) {
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(noisy.pixel_count());
    const double mean = sum / n;
    const double std = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std > 97.0);
    CHECK(std < 103.0);
    CHECK(std::abs(mean) < 4.0 * 100.0 / 256.0);
}

TEST_CASE("noisy checker PSNR matches the theoretical value") {
    const Image clean = make_checker();
    const Image noisy = add_noise(clean, NoiseSpec{100.0, 7});
    const double expected = 20.0 * std::log10(255.0 / 100.0);  // 8.131 dB
    CHECK(psnr(clean, noisy) == Approx(expected).margin(0.1));
}

TEST_CASE("1d noise shares the stream contract") {
    const std::vector<double> flat(10, 0.0);
    const auto noisy = add_noise(flat, NoiseSpec{1.0, 5});
    const Image img(10, 1, std::vector<double>(10, 0.0));
    const Image img_noisy = add_noise(img, NoiseSpec{1.0, 5});
    CHECK(noisy == img_noisy.data());
}

TEST_CASE("estimate_sigma basics") {
    const Image constant(16, 16, std::vector<double>(256, 9.0));
    CHECK(estimate_sigma(constant) == 0.0);

    CHECK_THROWS_AS(estimate_sigma(Image(2, 2)), invalid_parameter);
}

TEST_CASE("estimate_sigma recovers the noise level on pure noise") {
    const Image noisy = add_noise(Image(256, 256), NoiseSpec{20.0, 11});
    CHECK(estimate_sigma(noisy) == Approx(20.0).epsilon(0.10));
}

TEST_CASE("estimate_sigma tolerates checker edges") {
    const Image noisy = add_noise(make_checker(), NoiseSpec{60.0, 13});
    CHECK(estimate_sigma(noisy) == Approx(60.0).epsilon(0.15));
}

TEST_CASE("estimate_sigma is shift invariant and scales linearly") {
    const Image noisy = add_noise(Image(64, 64), NoiseSpec{10.0, 3});
    std::vector<double> shifted = noisy.data();
    for (double& v : shifted)
        v += 100.0;
    CHECK(estimate_sigma(Image(64, 64, std::move(shifted))) ==
          Approx(estimate_sigma(noisy)).margin(1e-9));

    std::vector<double> doubled = noisy.data();
    for (double& v : doubled)
        v *= 2.0;
    CHECK(estimate_sigma(Image(64, 64, std::move(doubled))) ==
          2.0 * estimate_sigma(noisy));  // exact for a power-of-two scale
}
