#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "scsc/tensor.hpp"

using namespace scsc;

TEST_CASE("conv2d_same with a 1x1 identity kernel returns the input") {
    Rng rng(7);
    const Tensor input = oracle::random_tensor(Shape{1, 4, 4}, rng);
    const FilterBank bank(Tensor::from_data(Shape{1, 1, 1, 1}, {1.0}));
    const Tensor out = conv2d_same(input, bank);
    for (std::size_t i = 0; i < input.numel(); ++i) CHECK(out[i] == input[i]);
}

TEST_CASE("conv2d_same zero padding arithmetic on an all-ones image") {
    const Tensor input(Shape{1, 5, 5}, 1.0);
    const FilterBank bank(Tensor(Shape{1, 1, 3, 3}, 1.0));
    const Tensor out = conv2d_same(input, bank);
    CHECK(out.at(0, 2, 2) == doctest::Approx(9.0));
    CHECK(out.at(0, 0, 0) == doctest::Approx(4.0));
    CHECK(out.at(0, 0, 4) == doctest::Approx(4.0));
    CHECK(out.at(0, 4, 0) == doctest::Approx(4.0));
    CHECK(out.at(0, 4, 4) == doctest::Approx(4.0));
    CHECK(out.at(0, 0, 2) == doctest::Approx(6.0));
    CHECK(out.at(0, 2, 0) == doctest::Approx(6.0));
}

TEST_CASE("conv2d_same matches the nested-loop oracle") {
    Rng rng(13);
    const Tensor input = oracle::random_tensor(Shape{2, 6, 6}, rng);
    const Tensor kernels = oracle::random_tensor(Shape{3, 2, 3, 3}, rng);
    const Tensor got = conv2d_same(input, FilterBank(kernels));
    const Tensor want = oracle::conv2d_same(input, kernels);
    for (std::size_t i = 0; i < got.numel(); ++i) {
        CHECK(std::abs(got[i] - want[i]) <= 1e-12 * std::max(1.0, std::abs(want[i])));
    }
}

TEST_CASE("conv2d_same is linear in the input") {
    Rng rng(17);
    const Tensor x1 = oracle::random_tensor(Shape{2, 5, 5}, rng);
    const Tensor x2 = oracle::random_tensor(Shape{2, 5, 5}, rng);
    const FilterBank bank = oracle::random_bank(3, 2, 3, rng);
    const double a = 0.37, b = -1.21;
    Tensor combo = a * x1 + b * x2;
    const Tensor lhs = conv2d_same(combo, bank);
    const Tensor rhs = a * conv2d_same(x1, bank) + b * conv2d_same(x2, bank);
    for (std::size_t i = 0; i < lhs.numel(); ++i) {
        CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-12 * std::max(1.0, std::abs(rhs[i])));
    }
}

TEST_CASE("conv2d_same validates shapes and kernel size") {
    const Tensor input(Shape{2, 4, 4}, 1.0);
    CHECK_THROWS_AS(conv2d_same(input, FilterBank(Tensor(Shape{1, 3, 3, 3}))),
                    DimensionError);
    CHECK_THROWS_AS(FilterBank(Tensor(Shape{1, 1, 2, 2})), ConfigError);
    CHECK_THROWS_AS(conv2d_same(Tensor(Shape{4, 4}, 1.0),
                                FilterBank(Tensor(Shape{1, 1, 1, 1}, 1.0))),
                    DimensionError);
}

TEST_CASE("non-finite values are an error condition, not a value") {
    Tensor input(Shape{1, 3, 3}, 1.0);
    input[4] = std::numeric_limits<double>::quiet_NaN();
    const FilterBank bank(Tensor(Shape{1, 1, 1, 1}, 1.0));
    CHECK_THROWS_AS(conv2d_same(input, bank), NumericError);
}

TEST_CASE("rotate180 leaves a symmetric kernel unchanged") {
    const FilterBank bank(Tensor::from_data(Shape{1, 1, 3, 3},
                                            {1, 2, 1, 2, 5, 2, 1, 2, 1}));
    const FilterBank rot = rotate180(bank);
    for (std::size_t i = 0; i < 9; ++i) CHECK(rot.kernels()[i] == bank.kernels()[i]);
}

TEST_CASE("rotate180 flips the spatial layout") {
    // [[1,2,0],[3,4,0],[0,0,0]] -> [[0,0,0],[0,4,3],[0,2,1]]
    const FilterBank bank(Tensor::from_data(Shape{1, 1, 3, 3},
                                            {1, 2, 0, 3, 4, 0, 0, 0, 0}));
    const FilterBank rot = rotate180(bank);
    const std::vector<double> want{0, 0, 0, 0, 4, 3, 0, 2, 1};
    for (std::size_t i = 0; i < 9; ++i) CHECK(rot.kernels()[i] == want[i]);
}

TEST_CASE("rotate180 realizes the adjoint of conv2d_same") {
    Rng rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const FilterBank bank = oracle::random_bank(3, 2, 3, rng);
        const Tensor x = oracle::random_tensor(Shape{2, 7, 6}, rng);
        const Tensor y = oracle::random_tensor(Shape{3, 7, 6}, rng);
        const double lhs = dot(conv2d_same(x, bank), y);
        const double rhs = dot(x, conv2d_same(y, rotate180(bank)));
        CHECK(oracle::rel_err(lhs, rhs) <= 1e-12);
    }
    // applying it twice restores the original bank
    const FilterBank bank = oracle::random_bank(2, 4, 5, rng);
    const FilterBank twice = rotate180(rotate180(bank));
    for (std::size_t i = 0; i < bank.kernels().numel(); ++i) {
        CHECK(twice.kernels()[i] == bank.kernels()[i]);
    }
}

TEST_CASE("conv2d_same_kernel_grad matches a finite-difference probe") {
    Rng rng(29);
    const Tensor input = oracle::random_tensor(Shape{2, 5, 5}, rng);
    const Tensor upstream = oracle::random_tensor(Shape{3, 5, 5}, rng);
    Tensor kernels = oracle::random_tensor(Shape{3, 2, 3, 3}, rng);
    const Tensor grad = conv2d_same_kernel_grad(input, upstream, 3);
    const double h = 1e-6;
    for (std::size_t i : {std::size_t(0), std::size_t(7), std::size_t(26)}) {
        Tensor kp = kernels, km = kernels;
        kp[i] += h;
        km[i] -= h;
        const double fp = dot(conv2d_same(input, FilterBank(kp)), upstream);
        const double fm = dot(conv2d_same(input, FilterBank(km)), upstream);
        CHECK(grad[i] == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("upsample_bicubic reproduces constants") {
    const Tensor img(Shape{2, 4, 5}, 0.7);
    const Tensor up = upsample_bicubic(img, 2);
    CHECK(up.extent(1) == 8);
    CHECK(up.extent(2) == 10);
    for (double v : up.values()) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("upsample_bicubic with ratio 1 is the identity") {
    Rng rng(31);
    const Tensor img = oracle::random_tensor(Shape{1, 6, 6}, rng);
    const Tensor up = upsample_bicubic(img, 1);
    for (std::size_t i = 0; i < img.numel(); ++i) CHECK(up[i] == img[i]);
}

TEST_CASE("upsample_bicubic reproduces a bilinear ramp in the interior") {
    const std::size_t m = 12;
    Tensor img(Shape{1, m, m});
    const auto ramp = [](double i, double j) { return 0.2 + 0.03 * i + 0.05 * j; };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) img.at(0, i, j) = ramp(double(i), double(j));
    }
    const int r = 2;
    const Tensor up = upsample_bicubic(img, r);
    for (std::size_t i = 3; i <= 20; ++i) {
        for (std::size_t j = 3; j <= 20; ++j) {
            const double x = (double(i) + 0.5) / r - 0.5;
            const double y = (double(j) + 0.5) / r - 0.5;
            CHECK(up.at(0, i, j) == doctest::Approx(ramp(x, y)).epsilon(1e-6));
        }
    }
}

TEST_CASE("upsample_bicubic rejects ratios below 1") {
    CHECK_THROWS_AS(upsample_bicubic(Tensor(Shape{1, 4, 4}, 0.0), 0), ConfigError);
}

TEST_CASE("gaussian_blur_downsample keeps constants (kernel sums to 1)") {
    const Tensor img(Shape{3, 8, 8}, 0.3);
    const Tensor low = gaussian_blur_downsample(img, 2, 1.0);
    CHECK(low.extent(1) == 4);
    CHECK(low.extent(2) == 4);
    for (double v : low.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("gaussian_blur_downsample of an impulse samples the kernel") {
    const double sigma = 1.0;
    Tensor img(Shape{1, 16, 16}, 0.0);
    img.at(0, 8, 8) = 1.0;
    const Tensor low = gaussian_blur_downsample(img, 2, sigma);

    // normalized separable kernel, radius 3; the impulse sits away from the
    // boundary so no reflection terms contribute
    const long radius = 3;
    std::vector<double> g(2 * radius + 1);
    double norm = 0;
    for (long t = -radius; t <= radius; ++t) {
        g[std::size_t(t + radius)] = std::exp(-double(t * t) / (2 * sigma * sigma));
        norm += g[std::size_t(t + radius)];
    }
    for (double& w : g) w /= norm;

    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            const long di = long(2 * i) - 8, dj = long(2 * j) - 8;
            double want = 0.0;
            if (std::abs(di) <= radius && std::abs(dj) <= radius) {
                want = g[std::size_t(di + radius)] * g[std::size_t(dj + radius)];
            }
            CHECK(low.at(0, i, j) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("gaussian_blur_downsample with r=1 and tiny sigma is near-identity") {
    Rng rng(37);
    const Tensor img = oracle::random_tensor(Shape{2, 6, 6}, rng, 0.0, 1.0);
    const Tensor out = gaussian_blur_downsample(img, 1, 0.1);
    for (std::size_t i = 0; i < img.numel(); ++i) {
        CHECK(out[i] == doctest::Approx(img[i]).epsilon(1e-6));
    }
}

TEST_CASE("gaussian_blur_downsample validates its inputs") {
    CHECK_THROWS_AS(gaussian_blur_downsample(Tensor(Shape{1, 5, 4}, 0.0), 2, 1.0),
                    DimensionError);
    CHECK_THROWS_AS(gaussian_blur_downsample(Tensor(Shape{1, 4, 4}, 0.0), 2, 0.0),
                    ConfigError);
}

TEST_CASE("tensor invariants") {
    CHECK_THROWS_AS(Tensor::from_data(Shape{2, 3}, {1.0, 2.0}), DimensionError);
    CHECK_THROWS_AS(Tensor(Shape{}), DimensionError);
    CHECK_THROWS_AS(Tensor(Shape{1, 1, 1, 1, 1}), DimensionError);
    CHECK_THROWS_AS(Tensor(Shape{0, 3}), DimensionError);
}
