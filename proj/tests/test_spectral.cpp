#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kahler/geometry.hpp"
#include "kahler/spectral.hpp"

using namespace kahler;
constexpr double kPi = std::numbers::pi;

TEST(Spectral, RoundTrip) {
    auto sp = torus_spectral({2, 8});
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    ScalarField f(sp->size());
    for (double& v : f) v = nd(rng);
    auto c = sp->forward(f);
    sp->backward(c);
    for (std::size_t p = 0; p < f.size(); ++p) EXPECT_NEAR(c[p].real(), f[p], 1e-13);
}

TEST(Spectral, RejectsBadGrid) {
    EXPECT_THROW(TorusSpectral({1, 7}), InvalidArgument);
    EXPECT_THROW(Geometry::torus(1, 6), InvalidArgument);
}

// psi = a cos(2 pi x1): d_1 d_1bar psi = psi_xx / 4 = -pi^2 a cos,
// (d_1 d_1bar)^2 psi = psi_xxxx / 16 = pi^4 a cos.
TEST(Spectral, CosineDerivativesExact) {
    const double a = 0.01;
    const TorusGrid grid{1, 32};
    auto sp = torus_spectral(grid);
    const auto psi = sample_on_grid(grid, [&](std::span<const double> x) { return a * std::cos(2 * kPi * x[0]); });
    const auto c = sp->forward(psi);
    const Wirtinger second[2] = {{0, false}, {0, true}};
    const Wirtinger fourth[4] = {{0, false}, {0, false}, {0, true}, {0, true}};
    const auto d2 = sp->apply(c, second), d4 = sp->apply(c, fourth);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const double cx = std::cos(2 * kPi * grid.coordinates(p)[0]);
        EXPECT_NEAR(d2[p].real(), -kPi * kPi * a * cx, 1e-12);
        EXPECT_NEAR(d4[p].real(), std::pow(kPi, 4) * a * cx, 1e-10);
        EXPECT_NEAR(d4[p].imag(), 0.0, 1e-10);
    }
}

// f = cos(2 pi (x1 + y2)): d_1 d_2bar f = -i pi^2 cos(2 pi (x1 + y2)).
TEST(Spectral, MixedWirtingerDerivative) {
    const TorusGrid grid{2, 8};
    auto sp = torus_spectral(grid);
    const auto f = sample_on_grid(grid, [](std::span<const double> x) { return std::cos(2 * kPi * (x[0] + x[3])); });
    const MatrixField h = sp->ddbar(f);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto x = grid.coordinates(p);
        const double c = std::cos(2 * kPi * (x[0] + x[3]));
        EXPECT_NEAR(std::abs(h(p, 0, 1) - cd(0.0, -kPi * kPi * c)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(h(p, 1, 0) - std::conj(h(p, 0, 1))), 0.0, 1e-15);
        // d_1 d_1bar f = f_{x1 x1}/4 = -pi^2 c, d_2 d_2bar f = f_{y2 y2}/4 = -pi^2 c.
        EXPECT_NEAR(h(p, 0, 0).real(), -kPi * kPi * c, 1e-12);
        EXPECT_NEAR(h(p, 1, 1).real(), -kPi * kPi * c, 1e-12);
    }
}

TEST(Spectral, OffGridEvaluationAndPadding) {
    const TorusGrid grid{1, 16};
    auto sp = torus_spectral(grid);
    auto fn = [](double x, double y) { return std::sin(2 * kPi * (2 * x - y)) + 0.3 * std::cos(2 * kPi * 3 * y); };
    const auto f = sample_on_grid(grid, [&](std::span<const double> x) { return fn(x[0], x[1]); });
    const auto c = sp->forward(f);
    const double pt[2] = {0.123, 0.777};
    const auto v = sp->evaluate(c, pt, {{}});
    EXPECT_NEAR(v[0].real(), fn(pt[0], pt[1]), 1e-13);
    const auto fine = interpolate_field(*sp, f, 32);
    const TorusGrid g2{1, 32};
    for (std::size_t p = 0; p < g2.size(); ++p) {
        const auto x = g2.coordinates(p);
        EXPECT_NEAR(fine[p], fn(x[0], x[1]), 1e-13);
    }
}

TEST(Spectral, NyquistSplitOnPadding) {
    const TorusGrid grid{1, 8};
    auto sp = torus_spectral(grid);
    const auto f = sample_on_grid(grid, [](std::span<const double> x) { return std::cos(8 * kPi * x[0]); });
    const auto fine = interpolate_field(*sp, f, 16);
    const TorusGrid g2{1, 16};
    for (std::size_t p = 0; p < g2.size(); ++p) EXPECT_NEAR(fine[p], std::cos(8 * kPi * g2.coordinates(p)[0]), 1e-13);
}

TEST(Spectral, PairwiseSumIsOrderFixed) {
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / (1.0 + static_cast<double>(i));
    EXPECT_EQ(pairwise_sum(x), pairwise_sum(x));
    EXPECT_NEAR(pairwise_sum(x), 7.485470860550345, 1e-12);
}
