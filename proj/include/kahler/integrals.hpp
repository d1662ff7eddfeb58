#pragma once

// Wedge-power integrals on the torus, the epsilon expansion of the volume along a
// continuity path, and the bigness and nef lower-bound reports.
//
// Integrals are normalized so that the flat volume form integrates to 1. At a point,
// A^k ^ B^{n-k} / flat^n = det B * e_k(eigenvalues of B^{-1} A) / binom(n, k).

#include <Eigen/Dense>

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "kahler/curvature.hpp"
#include "kahler/inequalities.hpp"
#include "kahler/monge_ampere.hpp"

namespace kahler {

struct IntegralReport {
    int k = 0;
    int n = 0;
    double value = 0.0;
    int resolution = 0;               // N
    double quadrature_error = 0.0;    // |full grid - every other node|
    double class_value = std::numeric_limits<double>::quiet_NaN();  // from the mean (constant) forms
};

/// Mixed discriminant A^k ^ B^{n-k} / flat^n at one point; B positive, A Hermitian.
inline double mixed_density(const Matrix& a, const Matrix& b, int k) {
    const int n = static_cast<int>(b.rows());
    if (k < 0 || k > n) throw InvalidArgument("wedge density: k must be in [0, n]");
    Eigen::LLT<Matrix> llt(b);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("wedge density: second form must be positive");
    const Matrix linv = llt.matrixL().solve(Matrix::Identity(n, n));
    Matrix c = linv * a * linv.adjoint();
    c = 0.5 * (c + c.adjoint());
    const RealVector ev = hermitian_eigenvalues(c);
    std::vector<double> lam(ev.data(), ev.data() + ev.size());
    const double det_b = b.determinant().real();
    return det_b * elementary_symmetric(lam)[static_cast<std::size_t>(k)] / binomial(n, k);
}

namespace detail {

inline std::size_t side_of(std::size_t points, int n) {
    const double side = std::round(std::pow(static_cast<double>(points), 1.0 / (2 * n)));
    std::size_t N = static_cast<std::size_t>(side), total = 1;
    for (int d = 0; d < 2 * n; ++d) total *= N;
    if (total != points) throw DimensionMismatch("wedge_integral: field is not a full torus grid");
    return N;
}

inline bool on_even_subgrid(std::size_t p, std::size_t N, int n) {
    for (int d = 0; d < 2 * n; ++d, p /= N)
        if ((p % N) % 2 != 0) return false;
    return true;
}

inline Matrix field_mean(const MatrixField& f) {
    Matrix m = Matrix::Zero(f.n, f.n);
    std::vector<double> re(f.points), im(f.points);
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j) {
            for (std::size_t p = 0; p < f.points; ++p) {
                re[p] = f(p, i, j).real();
                im[p] = f(p, i, j).imag();
            }
            m(i, j) = cd(grid_mean(re), grid_mean(im));
        }
    return m;
}

}  // namespace detail

/// Integral of A^k ^ B^{n-k} over the unit torus.
inline IntegralReport wedge_integral(const MatrixField& A, const MatrixField& B, int k) {
    if (A.n != B.n || A.points != B.points) throw DimensionMismatch("wedge_integral: forms live on different grids");
    const int n = A.n;
    if (k < 0 || k > n) throw InvalidArgument("wedge_integral: k must be in [0, n]");
    const std::size_t N = detail::side_of(A.points, n);
    ScalarField density(A.points);
    ScalarField coarse;
    for (std::size_t p = 0; p < A.points; ++p) {
        density[p] = mixed_density(A.at(p), B.at(p), k);
        if (N % 2 == 0 && detail::on_even_subgrid(p, N, n)) coarse.push_back(density[p]);
    }
    IntegralReport rep;
    rep.k = k;
    rep.n = n;
    rep.resolution = static_cast<int>(N);
    rep.value = grid_mean(density);
    rep.quadrature_error = coarse.empty() ? std::numeric_limits<double>::quiet_NaN() : std::abs(rep.value - grid_mean(coarse));
    const Matrix bm = detail::field_mean(B);
    if (is_positive_definite(bm, kMetricDegeneracy)) rep.class_value = mixed_density(detail::field_mean(A), bm, k);
    return rep;
}

inline IntegralReport wedge_integral(const FormField& A, const FormField& B, int k) {
    return wedge_integral(A.grid_values(), B.grid_values(), k);
}

// ---------------------------------------------------------------------------
// Epsilon expansion

struct ExpansionReport {
    std::vector<double> epsilons;
    std::vector<double> volumes;        // integral of omega_eps^n
    std::vector<double> coefficients;   // c_j of sum_j c_j eps^j, j = 0..n
    std::vector<double> expected;       // class-level values: (0, ..., 0, integral of omega^n) on the torus
    std::vector<double> chern_terms;    // c_j / binom(n, j) = integral of c1^{n-j} ^ omega^j
    double max_deviation = 0.0;
    double condition_number = 0.0;
    double max_fit_residual = 0.0;
    double tolerance = 1e-8;
    bool pass = false;
};

inline constexpr double kExpansionConditionLimit = 1e12;

/// Least-squares fit of volumes against 1, eps, ..., eps^n. The expected coefficients
/// are binom(n, j) times the class-level integrals of c1^{n-j} ^ omega^j.
inline ExpansionReport fit_epsilon_expansion(const std::vector<double>& epsilons, const std::vector<double>& volumes, int n,
                                             const std::vector<double>& expected, double tol = 1e-8) {
    if (epsilons.size() != volumes.size()) throw DimensionMismatch("epsilon expansion: one volume per epsilon");
    if (static_cast<int>(epsilons.size()) < std::max(3, n + 2))
        throw InvalidArgument("epsilon expansion: need at least max(3, n + 2) states, got " + std::to_string(epsilons.size()));
    if (static_cast<int>(expected.size()) != n + 1) throw DimensionMismatch("epsilon expansion: expected coefficients");
    const int rows = static_cast<int>(epsilons.size());
    Eigen::MatrixXd design(rows, n + 1);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
        for (int j = 0; j <= n; ++j) design(r, j) = std::pow(epsilons[static_cast<std::size_t>(r)], j);
        rhs(r) = volumes[static_cast<std::size_t>(r)];
    }
    // Column scaling before the conditioning check: powers of a long geometric schedule
    // differ by orders of magnitude even when the fit is well posed.
    Eigen::VectorXd scale = design.colwise().norm().transpose();
    const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    ExpansionReport rep;
    rep.epsilons = epsilons;
    rep.volumes = volumes;
    rep.expected = expected;
    rep.tolerance = tol;
    rep.condition_number = sv(0) / sv(sv.size() - 1);
    if (!(rep.condition_number < kExpansionConditionLimit))
        throw InvalidArgument("epsilon expansion: design matrix ill-conditioned (condition number " +
                              format_residual(rep.condition_number) + ")");
    const Eigen::VectorXd c = svd.solve(rhs).cwiseQuotient(scale);
    for (int j = 0; j <= n; ++j) {
        rep.coefficients.push_back(c(j));
        rep.chern_terms.push_back(c(j) / binomial(n, j));
        rep.max_deviation = std::max(rep.max_deviation, std::abs(c(j) - expected[static_cast<std::size_t>(j)]));
    }
    rep.max_fit_residual = (design * c - rhs).cwiseAbs().maxCoeff();
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

/// Volume of omega_eps along the path against the expansion in eps; on the torus every
/// c1 term vanishes and only eps^n times the volume of omega survives.
inline ExpansionReport epsilon_expansion_check(const std::vector<ContinuityState>& path, const MetricField& omega, double tol = 1e-8) {
    if (!omega.is_torus()) throw InvalidArgument("epsilon_expansion_check: torus metric field required");
    const int n = omega.dim();
    const MatrixField& g = omega.metric();
    std::vector<double> eps, vol;
    for (const auto& st : path) {
        eps.push_back(st.epsilon);
        vol.push_back(wedge_integral(st.omega_eps, g, n).value);
    }
    // c1(K) is represented by dd^c log omega^n, whose class on the torus is that of its mean.
    const MatrixField c1 = [&] {
        MatrixField r = ricci_form(omega).grid_values();
        for (auto& x : r.data) x = -x;
        return r;
    }();
    std::vector<double> expected;
    for (int j = 0; j <= n; ++j) expected.push_back(binomial(n, j) * wedge_integral(c1, g, n - j).class_value);
    return fit_epsilon_expansion(eps, vol, n, expected, tol);
}

// ---------------------------------------------------------------------------
// Bigness bound

struct StateBound {
    double epsilon = 0.0;
    InequalityReport volume_bound;  // integral sigma_n omega^n >= ((n+1)/2)^n kappa0^n integral omega^n
    InequalityReport trace_chain;   // min over points of S_eps - n sigma_n^{-1/n} >= 0
    InequalityReport S_bound;       // max principle S_eps <= 2n / ((n+1) kappa0)
};

struct BignessReport {
    ReportStatus status = ReportStatus::Checked;
    double kappa0 = 0.0;
    std::string note;
    std::vector<StateBound> states;
    double extrapolated_volume = std::numeric_limits<double>::quiet_NaN();  // eps -> 0 limit of the fit
    double lower_bound = std::numeric_limits<double>::quiet_NaN();         // ((n+1)/2)^n kappa0^n integral omega^n
    std::size_t nonnegative_hmax_points = 0;
    std::vector<double> worst_point;

    bool failed() const {
        if (status == ReportStatus::NotApplicable) return false;
        for (const auto& s : states)
            if (s.volume_bound.failed() || s.trace_chain.failed() || s.S_bound.failed()) return true;
        return false;
    }
};

inline BignessReport bigness_bound_report(const KappaFloor& floor, const MetricField& omega, const std::vector<ContinuityState>& path,
                                          double tol = 1e-8) {
    BignessReport rep;
    rep.kappa0 = floor.kappa0;
    rep.nonnegative_hmax_points = floor.nonnegative_hmax_points;
    if (floor.worst_point.size() > 0) rep.worst_point = omega.real_coords(floor.worst_point);
    if (!(floor.kappa0 > 0.0)) {
        rep.status = ReportStatus::NotApplicable;
        std::ostringstream note;
        note << std::setprecision(6) << "kappa_0 = " << floor.kappa0 + 0.0 << " <= 0: Hmax >= 0 at " << floor.nonnegative_hmax_points
             << " of " << floor.samples << " sampled points (worst Hmax = " << floor.worst_hmax + 0.0
             << "); the bound needs negative holomorphic sectional curvature";
        rep.note = note.str();
        return rep;
    }
    if (!omega.is_torus()) throw InvalidArgument("bigness_bound_report: integrals need a torus metric field");
    const int n = omega.dim();
    const MatrixField& g = omega.metric();
    const double volume_omega = wedge_integral(g, g, n).value;
    rep.lower_bound = std::pow((n + 1.0) / 2.0, n) * std::pow(floor.kappa0, n) * volume_omega;
    std::vector<double> eps, vol;
    for (const auto& st : path) {
        StateBound sb;
        sb.epsilon = st.epsilon;
        const double v = wedge_integral(st.omega_eps, g, n).value;
        sb.volume_bound = make_report("bigness_volume", v, rep.lower_bound, tol);
        double chain = std::numeric_limits<double>::infinity(), smax = 0.0;
        for (std::size_t p = 0; p < g.points; ++p) {
            const HermitianMetric gw(g.at(p)), ge(st.omega_eps.at(p));
            const SigmaVector sigma = sigma_ratios(gw, ge);
            const double S = trace_S(gw, ge);
            chain = std::min(chain, S - n * std::pow(sigma[n], -1.0 / n));
            smax = std::max(smax, S);
        }
        sb.trace_chain = make_report("trace_newton_maclaurin", chain, 0.0, tol);
        const std::vector<double> Sfield{smax};
        sb.S_bound = max_principle_S_bound(floor.kappa0, Sfield, n, tol);
        eps.push_back(st.epsilon);
        vol.push_back(v);
        rep.states.push_back(std::move(sb));
    }
    if (static_cast<int>(eps.size()) >= std::max(3, n + 2)) {
        std::vector<double> unknown(static_cast<std::size_t>(n + 1), 0.0);
        rep.extrapolated_volume = fit_epsilon_expansion(eps, vol, n, unknown, tol).coefficients[0];
    }
    return rep;
}

inline BignessReport bigness_bound_report(double kappa0, const MetricField& omega, const std::vector<ContinuityState>& path,
                                          double tol = 1e-8) {
    KappaFloor floor;
    floor.kappa0 = kappa0;
    return bigness_bound_report(floor, omega, path, tol);
}

// ---------------------------------------------------------------------------
// Pre-limit nef bound

struct NefRow {
    double epsilon = 0.0;
    int k = 0;
    IntegralReport mixed;  // integral omega_eps^k ^ omega^{n-k}
    InequalityReport bound;
};

/// integral omega_eps^k ^ omega^{n-k} >= C^{k/n - 1} integral omega_eps^n, 1 <= k <= n.
inline std::vector<NefRow> nef_lower_bound_check(const std::vector<ContinuityState>& path, const MetricField& omega, double C,
                                                 double tol = 1e-8) {
    if (!(C > 0.0)) throw InvalidArgument("nef_lower_bound_check: C must be positive");
    const int n = omega.dim();
    const MatrixField& g = omega.metric();
    std::vector<NefRow> rows;
    for (const auto& st : path) {
        const double top = wedge_integral(st.omega_eps, g, n).value;
        for (int k = 1; k <= n; ++k) {
            NefRow row;
            row.epsilon = st.epsilon;
            row.k = k;
            row.mixed = wedge_integral(st.omega_eps, g, k);
            const double rhs = std::pow(C, static_cast<double>(k) / n - 1.0) * top;
            row.bound = make_report("nef_lower_bound_k" + std::to_string(k), row.mixed.value, rhs, tol);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace kahler
