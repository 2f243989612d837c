#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "scsc/prox.hpp"

using namespace scsc;
using prox::ThresholdVector;

namespace {

Tensor scalar_tensor(double v) { return Tensor::from_data(Shape{1}, {v}); }

} // namespace

TEST_CASE("soft threshold by definition") {
    CHECK(prox::soft_threshold_scalar(1.2, 0.5) == doctest::Approx(0.7));
    CHECK(prox::soft_threshold_scalar(-0.3, 0.5) == 0.0);
    CHECK(prox::soft_threshold_scalar(-1.0, 0.5) == doctest::Approx(-0.5));
    // zero threshold is the identity
    for (double x : {-2.0, -0.1, 0.0, 0.4, 3.0}) {
        CHECK(prox::soft_threshold_scalar(x, 0.0) == x);
    }
}

TEST_CASE("soft threshold solves its prox problem (grid oracle)") {
    Rng rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
        const double x = rng.uniform(-3.0, 3.0);
        const double g = rng.uniform(0.0, 1.5);
        const double got = prox::soft_threshold_scalar(x, g);
        const double want = oracle::prox_argmin(
            x, [&](double u) { return g * std::abs(u); }, -4.0, 4.0);
        CHECK(std::abs(oracle::soft_prox_objective(got, x, g) -
                       oracle::soft_prox_objective(want, x, g)) <= 1e-8);
    }
}

TEST_CASE("piecewise soft threshold branch examples") {
    // gamma = 0.5, s = 1
    CHECK(prox::piecewise_soft_threshold_scalar(3.0, 1.0, 0.5) == doctest::Approx(2.0));
    CHECK(prox::piecewise_soft_threshold_scalar(0.5, 1.0, 0.5) == doctest::Approx(0.5));
    CHECK(prox::piecewise_soft_threshold_scalar(1.5, 1.0, 0.5) == doctest::Approx(1.0));
    CHECK(prox::piecewise_soft_threshold_scalar(-0.7, 1.0, 0.5) == 0.0);
    CHECK(prox::piecewise_soft_threshold_scalar(-1.7, 1.0, 0.5) == doctest::Approx(-0.7));
    // mirrored table for s < 0
    CHECK(prox::piecewise_soft_threshold_scalar(-3.0, -1.0, 0.5) == doctest::Approx(-2.0));
    CHECK(prox::piecewise_soft_threshold_scalar(-1.5, -1.0, 0.5) == doctest::Approx(-1.0));
    CHECK(prox::piecewise_soft_threshold_scalar(-0.5, -1.0, 0.5) == doctest::Approx(-0.5));
    CHECK(prox::piecewise_soft_threshold_scalar(0.7, -1.0, 0.5) == 0.0);
    CHECK(prox::piecewise_soft_threshold_scalar(1.7, -1.0, 0.5) == doctest::Approx(0.7));
}

TEST_CASE("branch boundaries take the first-listed branch") {
    const double g = 0.5, s = 1.0;
    CHECK(prox::piecewise_soft_threshold_scalar(-2 * g, s, g) == 0.0);       // -2g <= x <= 0
    CHECK(prox::piecewise_soft_threshold_scalar(0.0, s, g) == 0.0);
    CHECK(prox::piecewise_soft_threshold_scalar(s, s, g) == s);              // s <= x <= s+2g
    CHECK(prox::piecewise_soft_threshold_scalar(s + 2 * g, s, g) == s);
}

TEST_CASE("piecewise soft threshold collapses to doubled soft threshold at s = 0") {
    for (int i = 0; i <= 10000; ++i) {
        const double x = -5.0 + 10.0 * double(i) / 10000.0;
        const double g = 0.4;
        CHECK(prox::piecewise_soft_threshold_scalar(x, 0.0, g) ==
              prox::soft_threshold_scalar(x, 2.0 * g));
    }
}

TEST_CASE("piecewise soft threshold solves the coupled prox problem (grid oracle)") {
    Rng rng(43);
    for (int trial = 0; trial < 1000; ++trial) {
        const double x = rng.uniform(-3.0, 3.0);
        const double s = rng.uniform(-2.0, 2.0);
        const double g = rng.uniform(0.0, 1.5);
        const double got = prox::piecewise_soft_threshold_scalar(x, s, g);
        const double want = oracle::prox_argmin(
            x, [&](double u) { return g * (std::abs(u) + std::abs(u - s)); }, -5.0, 5.0);
        CHECK(std::abs(oracle::coupled_prox_objective(got, x, s, g) -
                       oracle::coupled_prox_objective(want, x, s, g)) <= 1e-8);
    }
}

TEST_CASE("prox operators are nonexpansive and monotone") {
    Rng rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        const double g = rng.uniform(0.0, 1.0);
        const double s = rng.uniform(-2.0, 2.0);
        const double x1 = rng.uniform(-3.0, 3.0);
        const double x2 = rng.uniform(-3.0, 3.0);
        CHECK(std::abs(prox::soft_threshold_scalar(x1, g) -
                       prox::soft_threshold_scalar(x2, g)) <= std::abs(x1 - x2) + 1e-15);
        CHECK(std::abs(prox::piecewise_soft_threshold_scalar(x1, s, g) -
                       prox::piecewise_soft_threshold_scalar(x2, s, g)) <=
              std::abs(x1 - x2) + 1e-15);
        // monotone in x
        const double lo = std::min(x1, x2), hi = std::max(x1, x2);
        CHECK(prox::piecewise_soft_threshold_scalar(lo, s, g) <=
              prox::piecewise_soft_threshold_scalar(hi, s, g) + 1e-15);
    }
}

TEST_CASE("piecewise soft threshold is odd under joint sign flip") {
    Rng rng(53);
    for (int trial = 0; trial < 500; ++trial) {
        const double x = rng.uniform(-3.0, 3.0);
        const double s = rng.uniform(-2.0, 2.0);
        const double g = rng.uniform(0.0, 1.0);
        CHECK(prox::piecewise_soft_threshold_scalar(-x, -s, g) ==
              -prox::piecewise_soft_threshold_scalar(x, s, g));
    }
}

TEST_CASE("channel broadcast and contract checks") {
    Tensor x(Shape{2, 2, 2}, 0.0);
    for (std::size_t i = 0; i < 8; ++i) x[i] = (i < 4) ? 1.0 : -1.0;
    const ThresholdVector gamma(std::vector<double>{0.25, 0.75});
    const Tensor out = prox::soft_threshold(x, gamma);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(0.75));
    for (std::size_t i = 4; i < 8; ++i) CHECK(out[i] == doctest::Approx(-0.25));

    CHECK_THROWS_AS(prox::soft_threshold(x, ThresholdVector(std::vector<double>{0.1})),
                    DimensionError);
    CHECK_THROWS_AS(prox::soft_threshold(x, ThresholdVector(std::vector<double>{0.1, -0.2})),
                    ContractError);
    CHECK_THROWS_AS(
        prox::piecewise_soft_threshold(x, Tensor(Shape{2, 2, 1}, 0.0), gamma),
        DimensionError);
}

TEST_CASE("soft threshold vjp on the active and dead branches") {
    const ThresholdVector g(std::vector<double>{0.5});
    {
        auto vjp = prox::soft_threshold_vjp(scalar_tensor(1.2), g, scalar_tensor(1.0));
        CHECK(vjp.grad_x[0] == 1.0);
        CHECK(vjp.grad_gamma[0] == -1.0);
    }
    {
        auto vjp = prox::soft_threshold_vjp(scalar_tensor(0.3), g, scalar_tensor(1.0));
        CHECK(vjp.grad_x[0] == 0.0);
        CHECK(vjp.grad_gamma[0] == 0.0);
    }
    { // kink |x| = gamma uses the zero subgradient
        auto vjp = prox::soft_threshold_vjp(scalar_tensor(0.5), g, scalar_tensor(1.0));
        CHECK(vjp.grad_x[0] == 0.0);
        CHECK(vjp.grad_gamma[0] == 0.0);
    }
}

TEST_CASE("piecewise vjp branch values") {
    const ThresholdVector g(std::vector<double>{0.5});
    const Tensor side = scalar_tensor(1.0);
    {
        auto vjp = prox::piecewise_soft_threshold_vjp(scalar_tensor(3.0), side, g,
                                                      scalar_tensor(1.0));
        CHECK(vjp.grad_x[0] == 1.0);
        CHECK(vjp.grad_s[0] == 0.0);
        CHECK(vjp.grad_gamma[0] == -2.0);
    }
    {
        auto vjp = prox::piecewise_soft_threshold_vjp(scalar_tensor(1.5), side, g,
                                                      scalar_tensor(1.0));
        CHECK(vjp.grad_x[0] == 0.0);
        CHECK(vjp.grad_s[0] == 1.0);
        CHECK(vjp.grad_gamma[0] == 0.0);
    }
}

namespace {

// central differences of the scalar operators, at points away from kinks
void check_soft_fd(double x, double g) {
    const double h = 1e-6;
    auto vjp = prox::soft_threshold_vjp(scalar_tensor(x), ThresholdVector(std::vector<double>{g}),
                                        scalar_tensor(1.0));
    const double fdx = (prox::soft_threshold_scalar(x + h, g) -
                        prox::soft_threshold_scalar(x - h, g)) / (2 * h);
    const double fdg = (prox::soft_threshold_scalar(x, g + h) -
                        prox::soft_threshold_scalar(x, g - h)) / (2 * h);
    CHECK(std::abs(vjp.grad_x[0] - fdx) <= 1e-5 * std::max(1.0, std::abs(fdx)));
    CHECK(std::abs(vjp.grad_gamma[0] - fdg) <= 1e-5 * std::max(1.0, std::abs(fdg)));
}

void check_piecewise_fd(double x, double s, double g) {
    const double h = 1e-6;
    const ThresholdVector tv(std::vector<double>{g});
    auto vjp = prox::piecewise_soft_threshold_vjp(scalar_tensor(x), scalar_tensor(s), tv,
                                                  scalar_tensor(1.0));
    const auto P = prox::piecewise_soft_threshold_scalar;
    const double fdx = (P(x + h, s, g) - P(x - h, s, g)) / (2 * h);
    const double fds = (P(x, s + h, g) - P(x, s - h, g)) / (2 * h);
    const double fdg = (P(x, s, g + h) - P(x, s, g - h)) / (2 * h);
    CHECK(std::abs(vjp.grad_x[0] - fdx) <= 1e-5 * std::max(1.0, std::abs(fdx)));
    CHECK(std::abs(vjp.grad_s[0] - fds) <= 1e-5 * std::max(1.0, std::abs(fds)));
    CHECK(std::abs(vjp.grad_gamma[0] - fdg) <= 1e-5 * std::max(1.0, std::abs(fdg)));
}

} // namespace

TEST_CASE("vjps agree with finite differences away from kinks") {
    check_soft_fd(1.3, 0.4);
    check_soft_fd(-0.9, 0.4);
    check_soft_fd(0.1, 0.4);
    // all ten branches: s = 1.2 and s = -1.2 with gamma = 0.4
    for (double x : {-1.5, -0.3, 0.5, 1.4, 2.5}) check_piecewise_fd(x, 1.2, 0.4);
    for (double x : {-2.5, -1.4, -0.5, 0.3, 1.5}) check_piecewise_fd(x, -1.2, 0.4);
}
