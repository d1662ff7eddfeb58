#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "kahler/hermitian.hpp"
#include "test_support.hpp"

using namespace kahler;
using kahler::test::adjugate_inverse;
using kahler::test::random_spd;

TEST(RelativeEigenvalues, IdentityPair) {
    const auto ev = relative_eigenvalues(HermitianMetric::identity(3), HermitianMetric::identity(3));
    for (double v : ev) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(RelativeEigenvalues, DiagonalPair) {
    const double d[] = {8.0, 2.0};
    const auto ev = relative_eigenvalues(HermitianMetric::identity(2), HermitianMetric::diagonal(d));
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_NEAR(ev[0], 2.0, 1e-14);
    EXPECT_NEAR(ev[1], 8.0, 1e-14);
}

// Oracle: roots of det(gB - t gA) = 0, a quadratic for n = 2.
TEST(RelativeEigenvalues, RandomPairMatchesQuadraticRoots) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix a = random_spd(2, rng), b = random_spd(2, rng);
        const double qa = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)).real();
        const double qb = -(a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1)).real();
        const double qc = (b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0)).real();
        const double disc = std::sqrt(std::max(0.0, qb * qb - 4 * qa * qc));
        const double r1 = (-qb - disc) / (2 * qa), r2 = (-qb + disc) / (2 * qa);
        const auto ev = relative_eigenvalues(HermitianMetric(a), HermitianMetric(b));
        EXPECT_NEAR(ev[0], r1, 1e-9 * std::max(1.0, r2));
        EXPECT_NEAR(ev[1], r2, 1e-9 * std::max(1.0, r2));
    }
}

TEST(RelativeEigenvalues, Errors) {
    EXPECT_THROW(relative_eigenvalues(HermitianMetric::identity(2), HermitianMetric::identity(3)), DimensionMismatch);
    Matrix bad(2, 2);
    bad << 1.0, 0.0, 0.0, -1.0;
    EXPECT_THROW(HermitianMetric{bad}, NotPositiveDefinite);
    Matrix nonherm(2, 2);
    nonherm << 1.0, 0.5, 0.0, 1.0;
    EXPECT_THROW(HermitianMetric{nonherm}, InvalidArgument);
}

TEST(SigmaRatios, TrivialCases) {
    const auto s = sigma_ratios(HermitianMetric::identity(2), HermitianMetric::identity(2));
    EXPECT_NEAR(s[0], 1.0, 1e-15);
    EXPECT_NEAR(s[1], 2.0, 1e-15);
    EXPECT_NEAR(s[2], 1.0, 1e-15);
    const double d[] = {1.0, 4.0};
    const auto t = sigma_ratios(HermitianMetric::identity(2), HermitianMetric::diagonal(d));
    EXPECT_NEAR(t[1], 5.0, 1e-14);
    EXPECT_NEAR(t[2], 4.0, 1e-14);
}

// Oracle: characteristic-polynomial coefficients of M = gA^{-1} gB, formed
// through the adjugate: e1 = tr M, e2 = (tr(M)^2 - tr(M^2)) / 2, e3 = det M.
TEST(SigmaRatios, RandomN3MatchesCharacteristicPolynomial) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix a = random_spd(3, rng), b = random_spd(3, rng);
        const Matrix m = adjugate_inverse(a) * b;
        const double e1 = m.trace().real();
        const double e2 = 0.5 * (m.trace() * m.trace() - (m * m).trace()).real();
        const cd det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        const auto s = sigma_ratios(HermitianMetric(a), HermitianMetric(b));
        EXPECT_NEAR(s[1], e1, 1e-8 * std::abs(e1));
        EXPECT_NEAR(s[2], e2, 1e-8 * std::abs(e2));
        EXPECT_NEAR(s[3], det.real(), 1e-8 * std::abs(det));
        for (int k = 0; k <= 3; ++k) EXPECT_GT(s[k], 0.0);
    }
}

TEST(NewtonMaclaurin, EqualEigenvaluesGiveZero) {
    for (int n = 2; n <= 3; ++n)
        for (int k = 1; k < n; ++k) {
            std::vector<double> lam(static_cast<std::size_t>(n), 2.5);
            EXPECT_NEAR(newton_maclaurin_margin(SigmaVector(elementary_symmetric(lam)), k), 0.0, 1e-14);
        }
}

// Direct evaluation: sigma = (1, 5, 4); LHS = 4^{1/2} = 2, RHS = 4 / (5/2) = 1.6.
TEST(NewtonMaclaurin, HandEvaluatedPair) {
    const SigmaVector s({1.0, 5.0, 4.0});
    EXPECT_NEAR(newton_maclaurin_margin(s, 1), 0.4, 1e-15);
}

TEST(NewtonMaclaurin, RandomSweepNonNegative) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> logu(std::log(1e-3), std::log(1e3));
    double worst = 1.0;
    for (int trial = 0; trial < 100000; ++trial) {
        const int n = 2 + trial % 2;
        std::vector<double> lam(static_cast<std::size_t>(n));
        for (double& v : lam) v = std::exp(logu(rng));
        const SigmaVector s(elementary_symmetric(lam));
        for (int k = 1; k < n; ++k) {
            const double scale = std::pow(s[n], 1.0 / n);
            worst = std::min(worst, newton_maclaurin_margin(s, k) / scale);
        }
    }
    EXPECT_GE(worst, -1e-12);
}

TEST(NewtonMaclaurin, EqualityCharacterization) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> base(0.5, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + trial % 2;
        const double b = base(rng);
        for (double spread : {1e-9, 1e-4}) {
            std::vector<double> lam(static_cast<std::size_t>(n), b);
            lam.back() = b * (1.0 + spread);
            const double margin = newton_maclaurin_margin(SigmaVector(elementary_symmetric(lam)), 1);
            EXPECT_EQ(margin < 1e-12, spread < 1e-6) << "spread " << spread << " margin " << margin;
        }
    }
}

TEST(NewtonMaclaurin, KOutOfRange) {
    const SigmaVector s({1.0, 5.0, 4.0});
    EXPECT_THROW(newton_maclaurin_margin(s, 0), InvalidArgument);
    EXPECT_THROW(newton_maclaurin_margin(s, 2), InvalidArgument);
}

TEST(TraceS, TrivialCases) {
    std::mt19937_64 rng(9);
    const HermitianMetric g(random_spd(3, rng));
    EXPECT_NEAR(trace_S(g, g), 3.0, 1e-12);
    const double one[] = {1.0}, two[] = {2.0};
    EXPECT_NEAR(trace_S(HermitianMetric::diagonal(one), HermitianMetric::diagonal(two)), 0.5, 1e-15);
}

// S(g, g') = e_{n-1}(lambda) / e_n(lambda) with lambda the eigenvalues of g' relative to g.
TEST(TraceS, MatchesSigmaQuotient) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + trial % 3;
        const HermitianMetric g(random_spd(n, rng)), gp(random_spd(n, rng));
        const auto s = sigma_ratios(g, gp);
        const double quotient = s[n - 1] / s[n];
        EXPECT_NEAR(trace_S(g, gp), quotient, 1e-12 * std::max(1.0, quotient));
    }
}

TEST(TraceS, PropertyInequalities) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 1 + trial % 3;
        const HermitianMetric g(random_spd(n, rng)), gp(random_spd(n, rng));
        const double s = trace_S(g, gp);
        const double sr = trace_S(gp, g);
        EXPECT_GT(s, 0.0);
        EXPECT_GE(s * sr, n * n * (1.0 - 1e-12));
        const auto sig = sigma_ratios(g, gp);
        for (int k = 0; k <= n; ++k) EXPECT_GT(sig[k], 0.0);
        // S = sigma_{n-1}/sigma_n >= n sigma_n^{-1/n}.
        EXPECT_GE(s, n * std::pow(sig[n], -1.0 / n) * (1.0 - 1e-12));
        // S^{n-1} >= sigma_1 / sigma_n.
        if (n > 1) {
            EXPECT_GE(std::pow(s, n - 1), sig[1] / sig[n] * (1.0 - 1e-12));
        }
    }
}

TEST(NormalFrame, DiagonalizesPair) {
    std::mt19937_64 rng(31);
    for (int n = 1; n <= 3; ++n) {
        const Matrix g = random_spd(n, rng), gp = random_spd(n, rng);
        const NormalFrame f = normal_frame(g, gp);
        const Matrix gi = to_frame(g, f.transform), gpi = to_frame(gp, f.transform);
        EXPECT_LT((gi - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
        Matrix d = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) d(i, i) = f.diagonal(i);
        EXPECT_LT((gpi - d).cwiseAbs().maxCoeff(), 1e-9);
        // Diagonal of g' relative to g are the relative eigenvalues.
        const auto ev = relative_eigenvalues(HermitianMetric(g), HermitianMetric(gp));
        for (int i = 0; i < n; ++i) EXPECT_NEAR(f.diagonal(i), ev[static_cast<std::size_t>(i)], 1e-9 * ev.back());
    }
}
