#include <gtest/gtest.h>

#include <cmath>

#include "kahler/jet.hpp"

using namespace kahler;

namespace {
MultiIndex mi(int a, int b) {
    MultiIndex m{};
    m[0] = static_cast<std::uint8_t>(a);
    m[1] = static_cast<std::uint8_t>(b);
    return m;
}
}  // namespace

TEST(Jet, LayoutSizes) {
    EXPECT_EQ(jet_layout(1).size(), 5);
    EXPECT_EQ(jet_layout(2).size(), 15);
    EXPECT_EQ(jet_layout(4).size(), 70);
    EXPECT_EQ(jet_layout(6).size(), 210);
    EXPECT_THROW(jet_layout(7), InvalidArgument);
}

TEST(Jet, PolynomialDerivatives) {
    const auto& L = jet_layout(2);
    const double x0 = 0.7, y0 = -1.3;
    const Jet x = Jet::variable(L, 0, x0), y = Jet::variable(L, 1, y0);
    const Jet f = x * x * y + 3.0 * x;  // f_x = 2xy + 3, f_xy = 2x, f_xxy = 2
    EXPECT_NEAR(f.value().real(), x0 * x0 * y0 + 3 * x0, 1e-15);
    EXPECT_NEAR(f.derivative(mi(1, 0)).real(), 2 * x0 * y0 + 3, 1e-14);
    EXPECT_NEAR(f.derivative(mi(1, 1)).real(), 2 * x0, 1e-14);
    EXPECT_NEAR(f.derivative(mi(2, 1)).real(), 2.0, 1e-14);
    EXPECT_NEAR(std::abs(f.derivative(mi(2, 2))), 0.0, 1e-14);
}

// d^a/dx^a d^b/dy^b exp(x + 2y) = 2^b exp(x + 2y).
TEST(Jet, ExpComposition) {
    const auto& L = jet_layout(2);
    const Jet f = exp(Jet::variable(L, 0, 0.1) + 2.0 * Jet::variable(L, 1, -0.2));
    const double base = std::exp(0.1 - 0.4);
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b) EXPECT_NEAR(f.derivative(mi(a, b)).real(), std::pow(2.0, b) * base, 1e-13);
}

// f = log(1 + xy): f_xy = 1 / (1 + xy)^2, f_xxyy = (4xy - 2) / (1 + xy)^4 ... checked via u = xy.
TEST(Jet, LogComposition) {
    const auto& L = jet_layout(2);
    const double x0 = 0.3, y0 = 0.2, u = x0 * y0;
    const Jet f = log(1.0 + Jet::variable(L, 0, x0) * Jet::variable(L, 1, y0));
    EXPECT_NEAR(f.derivative(mi(1, 1)).real(), 1.0 / ((1 + u) * (1 + u)), 1e-14);
    // f_xxyy: differentiate f_xy = (1+xy)^{-2}: f_xxy = -2y^2 ... f_xxyy = -4y x'... use
    // g(x,y) = (1+xy)^{-2}; g_xy = -2(1+xy)^{-3} + 6xy(1+xy)^{-4}.
    EXPECT_NEAR(f.derivative(mi(2, 2)).real(), -2.0 / std::pow(1 + u, 3) + 6.0 * u / std::pow(1 + u, 4), 1e-13);
}

// (1 + x)^{1/3}: k-th derivative = prod_{m<k} (1/3 - m) (1 + x)^{1/3 - k}.
TEST(Jet, PowComposition) {
    const auto& L = jet_layout(1);
    const double x0 = 0.4;
    const Jet f = pow(1.0 + Jet::variable(L, 0, x0), 1.0 / 3.0);
    double coef = 1.0;
    for (int k = 0; k <= 4; ++k) {
        MultiIndex m{};
        m[0] = static_cast<std::uint8_t>(k);
        EXPECT_NEAR(f.derivative(m).real(), coef * std::pow(1 + x0, 1.0 / 3.0 - k), 1e-13);
        coef *= 1.0 / 3.0 - k;
    }
}

TEST(Jet, DifferentiateLowersOrder) {
    const auto& L = jet_layout(2);
    const Jet f = log(1.0 + Jet::variable(L, 0, 0.3) * Jet::variable(L, 1, 0.2));
    const Jet fx = f.differentiate(0);
    EXPECT_EQ(fx.order(), 3);
    EXPECT_NEAR(std::abs(fx.derivative(mi(0, 1)) - f.derivative(mi(1, 1))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fx.derivative(mi(1, 2)) - f.derivative(mi(2, 2))), 0.0, 1e-14);
    EXPECT_THROW(fx.derivative(mi(2, 2)), InvalidArgument);
}

TEST(Jet, QuotientMatchesProductInverse) {
    const auto& L = jet_layout(2);
    const Jet x = Jet::variable(L, 0, 0.5), y = Jet::variable(L, 1, 1.5);
    const Jet q = (x * y) / (1.0 + x);
    const Jet back = q * (1.0 + x);
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; a + b <= 4; ++b) {
            const double expected = (a == 0 && b == 0) ? 0.75 : (a == 1 && b == 0) ? 1.5 : (a == 0 && b == 1) ? 0.5
                                                             : (a == 1 && b == 1) ? 1.0 : 0.0;
            EXPECT_NEAR(back.derivative(mi(a, b)).real(), expected, 1e-13);
        }
}
