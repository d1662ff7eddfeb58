#pragma once

// Pointwise inequalities and identities of the Schwarz-lemma argument, reported
// as signed margins.

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "kahler/curvature.hpp"
#include "kahler/curvature_tensor.hpp"
#include "kahler/geometry.hpp"
#include "kahler/hermitian.hpp"

namespace kahler {

inline constexpr double kAlgebraicTolerance = 1e-9;
inline constexpr double kFiniteDifferenceTolerance = 1e-6;

enum class ReportStatus { Checked, NotApplicable };

inline const char* to_string(ReportStatus s) { return s == ReportStatus::Checked ? "checked" : "not-applicable"; }

struct InequalityReport {
    std::string name;
    std::vector<double> point;  // real coordinates, empty for algebraic checks
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // lhs - rhs
    double tolerance = kAlgebraicTolerance;
    bool pass = false;
    bool two_sided = false;  // identities pass on |margin| <= tol
    ReportStatus status = ReportStatus::Checked;
    std::string note;

    bool failed() const { return status == ReportStatus::Checked && !pass; }
};

inline InequalityReport make_report(std::string name, double lhs, double rhs, double tol, bool two_sided = false) {
    InequalityReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = lhs - rhs;
    r.tolerance = tol;
    r.two_sided = two_sided;
    r.pass = two_sided ? std::abs(r.margin) <= tol : r.margin >= -tol;
    return r;
}

inline InequalityReport not_applicable(std::string name, std::string why) {
    InequalityReport r;
    r.name = std::move(name);
    r.status = ReportStatus::NotApplicable;
    r.lhs = r.rhs = r.margin = std::numeric_limits<double>::quiet_NaN();
    r.note = std::move(why);
    return r;
}

struct SchwarzHypotheses {
    double kappa = 0.0;
    double lambda = 0.0;
    double mu = 0.0;

    void validate() const {
        if (!(kappa >= 0.0) || !(mu >= 0.0)) throw InvalidArgument("SchwarzHypotheses: kappa and mu must be >= 0");
    }
};

/// -sum R_{iīkk̄} / (g'_{iī} g'_{kk̄}) >= (n+1) kappa / (2n) S^2, evaluated in the frame
/// where g = I and g' is diagonal.
inline InequalityReport royden_margin(const KahlerCurvature& r, const HermitianMetric& g, const HermitianMetric& gPrime,
                                      double kappa, double tol = kAlgebraicTolerance) {
    if (!(kappa >= 0.0)) throw InvalidArgument("royden_margin: kappa must be >= 0");
    detail::require_same_dim(g, gPrime);
    const int n = g.dim();
    if (r.dim() != n) throw DimensionMismatch("royden_margin: tensor dimension");
    const NormalFrame frame = normal_frame(g.matrix(), gPrime.matrix());
    const KahlerCurvature rt = r.transformed(frame.transform);
    const RealVector& d = frame.diagonal;
    double lhs = 0.0, S = 0.0;
    for (int i = 0; i < n; ++i) {
        S += 1.0 / d(i);
        for (int k = 0; k < n; ++k) lhs -= rt(i, i, k, k).real() / (d(i) * d(k));
    }
    const double rhs = (n + 1.0) * kappa / (2.0 * n) * S * S;
    return make_report("royden", lhs, rhs, tol);
}

/// sum R'_{iī} / (g'_{iī})^2 >= -lambda S + (mu / n) S^2, in the frame g = I, g' diagonal.
/// Not applicable when Ric(omega') >= -lambda omega' + mu omega fails at the point.
inline InequalityReport ricci_term_margin(const Matrix& ric_prime, const HermitianMetric& g, const HermitianMetric& gPrime,
                                          double lambda, double mu, double tol = kAlgebraicTolerance) {
    detail::require_same_dim(g, gPrime);
    const int n = g.dim();
    if (ric_prime.rows() != n || ric_prime.cols() != n) throw DimensionMismatch("ricci_term_margin: Ricci dimension");
    if (!(mu >= 0.0)) throw InvalidArgument("ricci_term_margin: mu must be >= 0");
    const Matrix excess = ric_prime + lambda * gPrime.matrix() - mu * g.matrix();
    const double slack = hermitian_eigenvalues(0.5 * (excess + excess.adjoint()))(0);
    const double scale = std::max({1.0, ric_prime.cwiseAbs().maxCoeff(), std::abs(lambda) * gPrime.matrix().cwiseAbs().maxCoeff()});
    if (slack < -tol * scale)
        return not_applicable("ricci_term", "hypothesis Ric' >= -lambda g' + mu g fails (smallest eigenvalue " + std::to_string(slack) + ")");
    const NormalFrame frame = normal_frame(g.matrix(), gPrime.matrix());
    const Matrix rt = to_frame(ric_prime, frame.transform);
    const RealVector& d = frame.diagonal;
    double lhs = 0.0, S = 0.0;
    for (int i = 0; i < n; ++i) {
        lhs += rt(i, i).real() / (d(i) * d(i));
        S += 1.0 / d(i);
    }
    const double rhs = -lambda * S + mu / n * S * S;
    return make_report("ricci_term", lhs, rhs, tol);
}

namespace detail {

/// Metric at z without the trusted-region check, for finite-difference stencils that
/// reach just past a sample point.
inline Matrix metric_near(const MetricField& f, const Vector& z) {
    if (f.is_torus()) return f.metric_at(z);
    const int n = f.dim();
    const Jet j = chart_jet(f.chart_potential(), n, z);
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) g(i, k) = j.derivative(wirtinger_index(n, {i}, {k}));
    return 0.5 * (g + g.adjoint());
}

struct FdLaplacian {
    double value = 0.0;
    double truncation = 0.0;  // (h^2 / 12) |fourth derivative| per stencil line, from a five-point difference
};

/// Laplacian of `fn` at z for the Hermitian form `gp`, by central differences along a
/// gp-orthonormal frame: d_w d_wbar f = (f''(xi) + f''(i xi)) / 4.
template <class Fn>
FdLaplacian fd_laplacian_estimate(const Fn& fn, const Vector& z, const Matrix& gp, double h) {
    const int n = static_cast<int>(z.size());
    const Matrix t = normal_frame(gp, gp).transform;
    const double f0 = fn(z);
    FdLaplacian out;
    for (int a = 0; a < n; ++a)
        for (const cd rot : {cd(1.0, 0.0), cd(0.0, 1.0)}) {
            const Vector xi = rot * t.col(a);
            const double p1 = fn(z + h * xi), m1 = fn(z - h * xi);
            const double p2 = fn(z + 2.0 * h * xi), m2 = fn(z - 2.0 * h * xi);
            out.value += 0.25 * (p1 - 2.0 * f0 + m1) / (h * h);
            const double fourth = (p2 - 4.0 * p1 + 6.0 * f0 - 4.0 * m1 + m2) / (h * h * h * h);
            out.truncation += 0.25 * h * h / 12.0 * std::abs(fourth);
        }
    return out;
}

template <class Fn>
double fd_laplacian(const Fn& fn, const Vector& z, const Matrix& gp, double h) {
    return fd_laplacian_estimate(fn, z, gp, h).value;
}

inline bool is_flat(const MetricField& f) {
    if (!f.is_torus()) return false;
    const MatrixField& g = f.metric();
    const Matrix id = Matrix::Identity(f.dim(), f.dim());
    for (std::size_t p = 0; p < g.points; ++p)
        if ((g.at(p) - id).cwiseAbs().maxCoeff() > 1e-13) return false;
    return true;
}

}  // namespace detail

struct LaplacianIdentityCheck {
    InequalityReport identity;        // Laplacian of S by differences against the curvature expression
    InequalityReport diagonal_terms;  // third-derivative sum >= its diagonal part
    InequalityReport gradient_bound;  // diagonal part >= |grad' S|^2 / S
    double step = 0.0;
};

/// Flat ambient omega: Laplacian' S = sum R'_{iī}/g'^2_{iī} + sum |d_k g'_{ij̄}|^2/(g'_{iī} g'^2_{jj̄} g'_{kk̄}),
/// the ambient curvature term being zero.
inline LaplacianIdentityCheck laplacian_identity_check(const MetricField& omega, const MetricField& omegaPrime, const Vector& P,
                                                       double h = 1e-2) {
    if (!detail::is_flat(omega)) throw InvalidArgument("laplacian_identity_check: ambient metric must be the flat torus");
    if (!omegaPrime.is_torus() || omegaPrime.dim() != omega.dim())
        throw DimensionMismatch("laplacian_identity_check: omega' must live on the same torus");
    if (!(h > 0.0)) throw InvalidArgument("laplacian_identity_check: step must be positive");
    const int n = omega.dim();
    const LocalMetric lm = omegaPrime.local(P);
    // Unitary frame diagonalizing g' (g = I is preserved).
    const NormalFrame frame = normal_frame(Matrix::Identity(n, n), lm.g);
    const Matrix& t = frame.transform;
    const RealVector& d = frame.diagonal;
    const Matrix ric = to_frame(curvature_from_local(lm).ricci(lm.g), t);
    std::vector<Matrix> dgw(static_cast<std::size_t>(n));  // d/dw_k of g' in the frame
    for (int k = 0; k < n; ++k) {
        Matrix acc = Matrix::Zero(n, n);
        for (int m = 0; m < n; ++m) acc += t(m, k) * lm.dg[static_cast<std::size_t>(m)];
        dgw[static_cast<std::size_t>(k)] = to_frame(acc, t);
    }
    double ricci_sum = 0.0, third = 0.0, diagonal = 0.0, S = 0.0, grad2 = 0.0;
    for (int i = 0; i < n; ++i) {
        S += 1.0 / d(i);
        ricci_sum += ric(i, i).real() / (d(i) * d(i));
    }
    for (int k = 0; k < n; ++k) {
        const Matrix& dk = dgw[static_cast<std::size_t>(k)];
        cd dS = 0.0;
        for (int i = 0; i < n; ++i) {
            dS -= dk(i, i) / (d(i) * d(i));
            diagonal += std::norm(dk(i, i)) / (d(i) * d(i) * d(i) * d(k));
            for (int j = 0; j < n; ++j) third += std::norm(dk(i, j)) / (d(i) * d(j) * d(j) * d(k));
        }
        grad2 += std::norm(dS) / d(k);
    }
    const auto trace_S_at = [&](const Vector& z) { return detail::metric_near(omegaPrime, z).inverse().trace().real(); };
    const detail::FdLaplacian est = detail::fd_laplacian_estimate(trace_S_at, P, lm.g, h);
    const double lap = est.value;

    LaplacianIdentityCheck out;
    out.step = h;
    // Accepted within twice the estimated truncation error plus a roundoff allowance.
    const double roundoff = 1e-13 * S / (h * h);
    out.identity = make_report("laplacian_identity", lap, ricci_sum + third, 2.0 * est.truncation + roundoff, true);
    out.diagonal_terms = make_report("cauchy_schwarz_diagonal", third, diagonal, kAlgebraicTolerance * std::max(1.0, third));
    out.gradient_bound = make_report("cauchy_schwarz_gradient", diagonal, grad2 / S, kAlgebraicTolerance * std::max(1.0, diagonal));
    for (auto* r : {&out.identity, &out.diagonal_terms, &out.gradient_bound}) r->point = omegaPrime.real_coords(P);
    return out;
}

struct SchwarzCheckOptions {
    double step = 1e-2;  // finite-difference step, Richardson-extrapolated with step / 2
    double tol = kFiniteDifferenceTolerance;
    HscSearchOptions search{};
};

/// Tight pointwise hypotheses at P: kappa = max(0, -Hmax(omega)), lambda the smallest value
/// with Ric(omega') + lambda omega' - mu omega >= 0.
inline SchwarzHypotheses schwarz_hypotheses_at(const MetricField& omega, const MetricField& omegaPrime, const Vector& P,
                                               double mu = 0.0, const HscSearchOptions& search = {}) {
    SchwarzHypotheses hyp;
    hyp.mu = mu;
    hyp.kappa = std::max(0.0, -hsc_extremes(omega, P, search).hmax);
    const LocalMetric lp = omegaPrime.local(P);
    const Matrix ric = curvature_from_local(lp).ricci(lp.g);
    const Matrix g = omega.metric_at(P);
    // Smallest lambda: largest eigenvalue of g'^{-1}(mu g - Ric') in the g'-frame.
    const Matrix t = normal_frame(lp.g, lp.g).transform;
    const Matrix m = to_frame(Matrix(mu * g - ric), t);
    hyp.lambda = hermitian_eigenvalues(0.5 * (m + m.adjoint())).maxCoeff();
    return hyp;
}

/// Laplacian' log S >= [(n+1) kappa / (2n) + mu / n] S - lambda at P, with S = tr_{omega'} omega.
inline InequalityReport schwarz_conclusion_check(const MetricField& omega, const MetricField& omegaPrime, const SchwarzHypotheses& hyp,
                                                 const Vector& P, const SchwarzCheckOptions& opt = {}) {
    hyp.validate();
    if (omega.dim() != omegaPrime.dim()) throw DimensionMismatch("schwarz_conclusion_check: dimension mismatch");
    const int n = omega.dim();
    // Hypothesis certification at P.
    const HscExtremes ext = hsc_extremes(omega, P, opt.search);
    if (ext.hmax > -hyp.kappa + kAlgebraicTolerance * std::max(1.0, std::abs(ext.hmax)))
        return not_applicable("schwarz_conclusion", "HSC bound fails: Hmax = " + std::to_string(ext.hmax) + " > -kappa");
    const LocalMetric lp = omegaPrime.local(P);
    const Matrix g = omega.metric_at(P);
    const Matrix ric = curvature_from_local(lp).ricci(lp.g);
    const InequalityReport ricci = ricci_term_margin(ric, HermitianMetric(g), HermitianMetric(lp.g), hyp.lambda, hyp.mu);
    if (ricci.status == ReportStatus::NotApplicable) return not_applicable("schwarz_conclusion", ricci.note);

    const auto log_S = [&](const Vector& z) {
        const Matrix gp = detail::metric_near(omegaPrime, z);
        return std::log(gp.llt().solve(detail::metric_near(omega, z)).trace().real());
    };
    const double coarse = detail::fd_laplacian(log_S, P, lp.g, opt.step);
    const double fine = detail::fd_laplacian(log_S, P, lp.g, 0.5 * opt.step);
    const double lhs = (4.0 * fine - coarse) / 3.0;
    const double S = std::exp(log_S(P));
    const double rhs = ((n + 1.0) * hyp.kappa / (2.0 * n) + hyp.mu / n) * S - hyp.lambda;
    InequalityReport rep = make_report("schwarz_conclusion", lhs, rhs, opt.tol);
    rep.point = omegaPrime.real_coords(P);
    return rep;
}

/// S <= 2n / ((n+1) kappa0) over the samples; not applicable unless kappa0 > 0.
inline InequalityReport max_principle_S_bound(double kappa0, std::span<const double> S, int n, double tol = kAlgebraicTolerance) {
    if (n < 1 || n > kMaxDim) throw InvalidArgument("max_principle_S_bound: n must be 1..3");
    if (!(kappa0 > 0.0))
        return not_applicable("max_principle_S_bound",
                              "kappa_0 = " + std::to_string(kappa0) + " <= 0: holomorphic sectional curvature is not negative everywhere");
    if (S.empty()) throw InvalidArgument("max_principle_S_bound: empty S field");
    double smax = -std::numeric_limits<double>::infinity();
    for (double s : S) smax = std::max(smax, s);
    const double bound = 2.0 * n / ((n + 1.0) * kappa0);
    return make_report("max_principle_S_bound", bound, smax, tol * std::max(1.0, bound));
}

struct RoydenSweep {
    int trials = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    int failures = 0;
    std::vector<InequalityReport> reports;  // by trial index
};

/// Random Kähler-symmetric tensors shifted so that H < 0, kappa = -Hmax by brute force,
/// random g and g'.
inline RoydenSweep royden_sweep(int n, int trials, unsigned long long seed, const HscSearchOptions& search = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> nd;
    auto random_metric = [&] {
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = cd(nd(rng), nd(rng));
        Matrix m = a * a.adjoint() + 0.2 * Matrix::Identity(n, n);
        return HermitianMetric(0.5 * (m + m.adjoint()));
    };
    RoydenSweep out;
    out.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const HermitianMetric g = random_metric();
        const HermitianMetric gp = random_metric();
        KahlerCurvature r = random_kahler_symmetric(n, rng);
        const double shift = hsc_extremes(r, g, search).hmax + unit(rng);
        r += constant_hsc_tensor(g.matrix(), shift);
        const double kappa = std::max(0.0, -hsc_extremes(r, g, search).hmax);
        InequalityReport rep = royden_margin(r, g, gp, kappa);
        rep.note = "trial " + std::to_string(t);
        out.worst_margin = std::min(out.worst_margin, rep.margin);
        if (!rep.pass) ++out.failures;
        out.reports.push_back(std::move(rep));
    }
    return out;
}

struct NewtonMaclaurinSweep {
    int tuples = 0;
    double worst_margin = std::numeric_limits<double>::infinity();  // normalized by sigma_n^{1/n}
    int negative = 0;              // margin < -tolerance
    int equality_probes = 0;
    int equality_mismatches = 0;   // detection (margin < threshold) disagrees with spread < 1e-6
};

inline constexpr double kEqualityThreshold = 1e-12;

/// Random log-uniform eigenvalue tuples in [1e-3, 1e3] (n alternating 2, 3) and, per tuple,
/// one near-equal probe whose relative spread is log-uniform in [1e-12, 1e-8] or [1e-4, 1e-1].
inline NewtonMaclaurinSweep newton_maclaurin_sweep(int tuples, unsigned long long seed, double tol = 1e-12) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logu(std::log(1e-3), std::log(1e3)), unit(0.0, 1.0);
    NewtonMaclaurinSweep out;
    out.tuples = tuples;
    std::vector<double> lam;
    auto worst_of = [&](int n) {
        const SigmaVector s(elementary_symmetric(lam));
        const double scale = std::pow(s[n], 1.0 / n);
        double w = std::numeric_limits<double>::infinity();
        for (int k = 1; k < n; ++k) w = std::min(w, newton_maclaurin_margin(s, k) / scale);
        return w;
    };
    for (int t = 0; t < tuples; ++t) {
        const int n = 2 + t % 2;
        lam.assign(static_cast<std::size_t>(n), 0.0);
        for (double& v : lam) v = std::exp(logu(rng));
        const double m = worst_of(n);
        out.worst_margin = std::min(out.worst_margin, m);
        if (m < -tol) ++out.negative;

        const bool tight = unit(rng) < 0.5;
        const double spread = tight ? std::exp(std::log(1e-12) + unit(rng) * std::log(1e4))
                                    : std::exp(std::log(1e-4) + unit(rng) * std::log(1e3));
        const double b = std::exp(logu(rng));
        for (int i = 0; i < n; ++i) lam[static_cast<std::size_t>(i)] = b * (1.0 + spread * (i == 0 ? 0.0 : i == n - 1 ? 1.0 : unit(rng)));
        const double pm = worst_of(n);
        ++out.equality_probes;
        if ((pm < kEqualityThreshold) != (spread < 1e-6)) ++out.equality_mismatches;
        if (pm < -tol) ++out.negative;
        out.worst_margin = std::min(out.worst_margin, pm);
    }
    return out;
}

}  // namespace kahler
