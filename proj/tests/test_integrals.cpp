#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kahler/integrals.hpp"
#include "kahler/zoo.hpp"
#include "test_support.hpp"

using namespace kahler;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace {

Example perturbed(int n, int N, double amplitude = 0.02, std::vector<std::vector<int>> modes = {}) {
    ExampleParams p;
    p.n = n;
    p.N = N;
    p.amplitude = amplitude;
    p.modes = std::move(modes);
    return make_example("perturbed-torus", p);
}

MatrixField shifted(const MatrixField& base, const TorusSpectral& sp, const ScalarField& phi) {
    return detail::add_ddbar(sp, base, phi);
}

ScalarField smooth_phi(const TorusGrid& grid, double a) {
    return sample_on_grid(grid, [a](std::span<const double> x) {
        return a * std::exp(std::cos(kTwoPi * x[0]) + 0.5 * std::sin(kTwoPi * x[1]));
    });
}

}  // namespace

TEST(WedgeIntegral, FlatVolumeIsOne) {
    for (int n = 1; n <= 2; ++n) {
        const auto flat = make_example("flat-torus", {.n = n, .N = 8});
        for (int k = 0; k <= n; ++k) {
            const auto rep = wedge_integral(flat.field.metric(), flat.field.metric(), k);
            EXPECT_NEAR(rep.value, 1.0, 1e-15);
            EXPECT_EQ(rep.resolution, 8);
            EXPECT_NEAR(rep.class_value, 1.0, 1e-15);
        }
    }
}

TEST(WedgeIntegral, InvariantUnderDdcShifts) {
    for (int n : {1, 2}) {
        const int N = 32;
        const auto a = perturbed(n, N, 0.02);
        const auto b = perturbed(n, N, 0.015, n == 1 ? std::vector<std::vector<int>>{{0, 2}} : std::vector<std::vector<int>>{{0, 1, 1, 0}});
        const auto& sp = a.field.spectral();
        const ScalarField phi = smooth_phi(a.geometry.grid, 0.004);
        const MatrixField A = a.field.metric(), B = b.field.metric();
        const MatrixField A2 = shifted(A, sp, phi), B2 = shifted(B, sp, phi);
        for (int k = 0; k <= n; ++k) {
            const double base = wedge_integral(A, B, k).value;
            EXPECT_NEAR(wedge_integral(A2, B, k).value, base, 1e-10) << "n=" << n << " k=" << k;
            EXPECT_NEAR(wedge_integral(A, B2, k).value, base, 1e-10) << "n=" << n << " k=" << k;
            EXPECT_NEAR(wedge_integral(A2, B2, k).value, base, 1e-10) << "n=" << n << " k=" << k;
            // Both forms are flat plus exact terms, so every integral equals the flat one.
            EXPECT_NEAR(base, 1.0, 1e-10);
        }
    }
}

TEST(WedgeIntegral, ExactFormAloneIntegratesToClassValue) {
    const auto a = perturbed(2, 16, 0.02);
    const auto& sp = a.field.spectral();
    const ScalarField phi = smooth_phi(a.geometry.grid, 0.01);
    const MatrixField exact = sp.ddbar(phi);
    // k = 1: integral of dd^c phi ^ omega is zero.
    const auto rep = wedge_integral(exact, a.field.metric(), 1);
    EXPECT_NEAR(rep.value, 0.0, 1e-12);
    EXPECT_NEAR(rep.class_value, 0.0, 1e-12);
}

TEST(WedgeIntegral, PointwiseSigmaIdentity) {
    std::mt19937_64 rng(21);
    for (int n = 1; n <= 3; ++n)
        for (int t = 0; t < 200; ++t) {
            const Matrix a = test::random_spd(n, rng), b = test::random_spd(n, rng);
            const SigmaVector s = sigma_ratios(HermitianMetric(b), HermitianMetric(a));
            for (int k = 0; k <= n; ++k) {
                const double via_wedge = binomial(n, k) * mixed_density(a, b, k) / b.determinant().real();
                EXPECT_NEAR(via_wedge, s[k], 1e-12 * std::max(1.0, std::abs(s[k])));
            }
        }
}

TEST(WedgeIntegral, RefinementIsStable) {
    const auto coarse = perturbed(1, 32, 0.02), fine = perturbed(1, 64, 0.02);
    const ScalarField pc = smooth_phi(coarse.geometry.grid, 0.003), pf = smooth_phi(fine.geometry.grid, 0.003);
    const MatrixField ac = shifted(coarse.field.metric(), coarse.field.spectral(), pc);
    const MatrixField af = shifted(fine.field.metric(), fine.field.spectral(), pf);
    for (int k = 0; k <= 1; ++k) {
        const auto rc = wedge_integral(ac, coarse.field.metric(), k), rf = wedge_integral(af, fine.field.metric(), k);
        EXPECT_LT(std::abs(rc.value - rf.value), 1e-10);
        EXPECT_LT(rf.quadrature_error, 1e-10);
    }
}

TEST(WedgeIntegral, RejectsMismatchedGrids) {
    const auto a = perturbed(1, 16), b = perturbed(1, 32);
    EXPECT_THROW(wedge_integral(a.field.metric(), b.field.metric(), 1), DimensionMismatch);
    EXPECT_THROW(wedge_integral(a.field.metric(), a.field.metric(), 2), InvalidArgument);
}

TEST(WedgeIntegral, SolvedPathMatchesClass) {
    const auto ex = perturbed(2, 16, 0.02);
    const auto path = continuity_path(ex.field, geometric_schedule(1.0, 0.5, 5));
    for (const auto& st : path)
        for (int k = 0; k <= 2; ++k) {
            const auto rep = wedge_integral(st.omega_eps, ex.field.metric(), k);
            EXPECT_NEAR(rep.value, std::pow(st.epsilon, k), 1e-10) << st.epsilon << " " << k;
            EXPECT_NEAR(rep.class_value, std::pow(st.epsilon, k), 1e-12);
        }
}

TEST(EpsilonExpansion, FlatTorusOneDimension) {
    const auto flat = make_example("flat-torus", {.n = 1, .N = 16});
    const auto path = continuity_path(flat.field, geometric_schedule(1.0, 0.5, 6));
    for (const auto& st : path) EXPECT_NEAR(wedge_integral(st.omega_eps, flat.field.metric(), 1).value, st.epsilon, 1e-15);
    const auto rep = epsilon_expansion_check(path, flat.field);
    EXPECT_TRUE(rep.pass);
    EXPECT_NEAR(rep.coefficients[0], 0.0, 1e-12);
    EXPECT_NEAR(rep.coefficients[1], 1.0, 1e-12);
}

TEST(EpsilonExpansion, PerturbedTorusTwoDimensions) {
    const auto ex = perturbed(2, 16, 0.02);
    const auto path = continuity_path(ex.field, geometric_schedule(1.0, 0.5, 11));
    const auto rep = epsilon_expansion_check(path, ex.field);
    ASSERT_EQ(rep.coefficients.size(), 3u);
    EXPECT_NEAR(rep.coefficients[0], 0.0, 1e-8);
    EXPECT_NEAR(rep.coefficients[1], 0.0, 1e-8);
    EXPECT_NEAR(rep.coefficients[2], 1.0, 1e-8);
    EXPECT_NEAR(rep.expected[2], 1.0, 1e-12);
    EXPECT_TRUE(rep.pass);
    for (std::size_t k = 0; k < path.size(); ++k)
        EXPECT_NEAR(rep.volumes[k], path[k].epsilon * path[k].epsilon, 1e-8);
}

TEST(EpsilonExpansion, InjectedConstantDetected) {
    const std::vector<double> eps{1.0, 0.5, 0.25, 0.125, 0.0625};
    std::vector<double> vol;
    for (double e : eps) vol.push_back(e * e + 1e-4);
    const auto rep = fit_epsilon_expansion(eps, vol, 2, {0.0, 0.0, 1.0});
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.coefficients[0], 1e-4, 1e-12);
}

TEST(EpsilonExpansion, GuardsInput) {
    EXPECT_THROW(fit_epsilon_expansion({1.0, 0.5}, {1.0, 0.25}, 1, {0.0, 1.0}), InvalidArgument);
    EXPECT_THROW(fit_epsilon_expansion({1.0, 0.5, 0.25, 0.1}, {1.0, 0.25, 0.0625, 0.01}, 3, {0, 0, 0, 1}), InvalidArgument);
    // Nearly coincident epsilons make the design singular.
    EXPECT_THROW(fit_epsilon_expansion({1.0, 1.0 + 1e-15, 1.0 + 2e-15, 1.0 + 3e-15}, {1, 1, 1, 1}, 2, {0, 0, 1}), InvalidArgument);
}

TEST(Bigness, FlatTorusNotApplicable) {
    const auto flat = make_example("flat-torus", {.n = 1, .N = 16});
    const auto path = continuity_path(flat.field, {1.0, 0.5});
    const auto rep = bigness_bound_report(kappa_floor(flat.field), flat.field, path);
    EXPECT_EQ(rep.status, ReportStatus::NotApplicable);
    EXPECT_FALSE(rep.failed());
    EXPECT_TRUE(rep.states.empty());
    EXPECT_FALSE(rep.note.empty());
}

TEST(Bigness, PerturbedTorusShowsWhereHmaxIsNonnegative) {
    const auto ex = perturbed(2, 8, 0.02);
    const auto floor = kappa_floor(ex.field, {{400, 50}, 256});
    ASSERT_LT(floor.kappa0, 0.0);
    const auto rep = bigness_bound_report(floor, ex.field, {});
    EXPECT_EQ(rep.status, ReportStatus::NotApplicable);
    EXPECT_GT(rep.nonnegative_hmax_points, 0u);
    EXPECT_EQ(rep.worst_point.size(), 4u);
    EXPECT_NE(rep.note.find("Hmax >= 0"), std::string::npos);
}

TEST(Bigness, SyntheticEqualityCase) {
    // omega_eps = c omega with c = (n+1) kappa0 / 2: S = 2n / ((n+1) kappa0), sigma_n = c^n.
    for (int n = 1; n <= 2; ++n) {
        const auto flat = make_example("flat-torus", {.n = n, .N = 8});
        const double kappa0 = 0.8;
        const double c = (n + 1) * kappa0 / 2.0;
        std::vector<ContinuityState> path;
        for (double eps : {1.0, 0.5, 0.25, 0.125}) {
            ContinuityState st;
            st.epsilon = eps;
            st.omega_eps = flat.field.metric();
            for (auto& x : st.omega_eps.data) x *= c;
            path.push_back(st);
        }
        const auto rep = bigness_bound_report(kappa0, flat.field, path);
        ASSERT_EQ(rep.status, ReportStatus::Checked);
        EXPECT_FALSE(rep.failed());
        for (const auto& s : rep.states) {
            EXPECT_LE(std::abs(s.volume_bound.margin), 1e-14);
            EXPECT_LE(std::abs(s.trace_chain.margin), 1e-14);
            EXPECT_LE(std::abs(s.S_bound.margin), 1e-14);
        }
        EXPECT_NEAR(rep.extrapolated_volume, std::pow(c, n), 1e-10);
    }
}

TEST(NefBound, FlatTorusClosedForm) {
    const auto flat = make_example("flat-torus", {.n = 2, .N = 8});
    const auto eps = geometric_schedule(1.0, 0.5, 5);
    const auto path = continuity_path(flat.field, eps);
    const double C = std::exp(path.front().diag.log_C);
    EXPECT_NEAR(C, 1.0, 1e-12);
    for (const auto& row : nef_lower_bound_check(path, flat.field, C)) {
        const double e = row.epsilon;
        EXPECT_NEAR(row.bound.lhs, std::pow(e, row.k), 1e-12);
        EXPECT_NEAR(row.bound.rhs, std::pow(eps.front(), row.k - 2) * e * e, 1e-12);
        EXPECT_TRUE(row.bound.pass);
        if (row.k == 2) { EXPECT_EQ(row.bound.margin, 0.0); }
    }
}

TEST(NefBound, PerturbedTorusMargins) {
    const auto ex = perturbed(2, 16, 0.02);
    const auto path = continuity_path(ex.field, geometric_schedule(1.0, 0.5, 8));
    const double C = std::exp(path.front().diag.log_C);
    const auto rows = nef_lower_bound_check(path, ex.field, C);
    ASSERT_EQ(rows.size(), 2 * path.size());
    for (const auto& row : rows) {
        EXPECT_GE(row.bound.margin, -1e-8) << row.epsilon << " " << row.k;
        if (row.k == 2) { EXPECT_EQ(row.bound.margin, 0.0); }
    }
}
