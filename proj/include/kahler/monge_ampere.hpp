#pragma once

// Complex Monge-Ampère solver on the periodic torus and the epsilon continuity path.
//
//   (alpha + ddbar v)^n = exp(v + F) omega^n
//
// Newton linearization: (Laplacian of alpha + ddbar v) dv - dv = -residual, solved by
// restarted GMRES preconditioned with the flat Laplacian (diagonal in frequency space)
// after a pointwise rescaling.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "kahler/curvature.hpp"
#include "kahler/geometry.hpp"
#include "kahler/hermitian.hpp"
#include "kahler/spectral.hpp"

namespace kahler {

struct MAProblem {
    std::shared_ptr<const TorusSpectral> spectral;
    MatrixField base;       // alpha
    MatrixField reference;  // omega
    ScalarField datum;      // F

    int dim() const { return spectral->grid().n; }

    void validate() const {
        if (!spectral) throw InvalidArgument("MAProblem: missing grid");
        const std::size_t pts = spectral->size();
        const int n = dim();
        if (base.points != pts || reference.points != pts || datum.size() != pts || base.n != n || reference.n != n)
            throw DimensionMismatch("MAProblem: field sizes do not match the grid");
        for (double x : datum)
            if (!std::isfinite(x)) throw InvalidArgument("MAProblem: datum must be finite");
        for (std::size_t p = 0; p < pts; ++p) {
            const RealVector ev = hermitian_eigenvalues(base.at(p));
            if (!(ev(0) > kFieldDegeneracy * ev.cwiseAbs().maxCoeff())) throw PositivityLoss(p, ev(0), "MAProblem base form");
        }
    }
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iterations = 50;
    int max_halvings = 30;
    int krylov_restart = 40;
    int krylov_max_iterations = 800;
    double forcing_cap = 1e-4;  // relative linear tolerance min(cap, residual)
    int polish_steps = 0;       // extra Newton steps after tol is met, kept while they gain 2x
};

struct SolveReport {
    ScalarField v;          // level + variation
    double level = 0.0;     // constant part of v
    ScalarField variation;  // v - level, kept separately: the residual is sensitive to
                            // the last bits of v at high frequency
    std::vector<double> residuals;  // sup-norm log-residual before each Newton step, last = converged
    int iterations = 0;
    int linear_iterations = 0;
    double verified_residual = 0.0;  // independent forward evaluation
};

namespace detail {

inline double sup_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// ddbar of a field after removing its mean; a large constant part would otherwise
/// leak transform roundoff into every mode.
inline MatrixField ddbar_centered(const TorusSpectral& sp, std::span<const double> v) {
    const double mean = grid_mean(v);
    std::vector<double> w(v.begin(), v.end());
    for (double& x : w) x -= mean;
    return sp.ddbar(w);
}

/// base + ddbar v on every node.
inline MatrixField add_ddbar(const TorusSpectral& sp, const MatrixField& base, std::span<const double> v) {
    MatrixField m = ddbar_centered(sp, v);
    for (std::size_t q = 0; q < m.data.size(); ++q) m.data[q] += base.data[q];
    return m;
}

struct LogDet {
    ScalarField value;
    bool positive = true;
    std::size_t worst_point = 0;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
};

/// log det(scale * m) through eigenvalues, with the relative positivity check.
inline LogDet eigen_log_det(const MatrixField& m, double scale = 1.0) {
    LogDet out;
    out.value.resize(m.points);
    for (std::size_t p = 0; p < m.points; ++p) {
        const RealVector ev = hermitian_eigenvalues(scale * m.at(p));
        if (ev(0) < out.min_eigenvalue) {
            out.min_eigenvalue = ev(0);
            out.worst_point = p;
        }
        if (!(ev(0) > kFieldDegeneracy * ev.cwiseAbs().maxCoeff())) {
            out.positive = false;
            continue;
        }
        double s = 0.0;
        for (int i = 0; i < ev.size(); ++i) s += std::log(ev(i));
        out.value[p] = s;
    }
    return out;
}

/// log det(scale * m) through a Cholesky factorization; NaN where the factorization fails.
inline ScalarField cholesky_log_det(const MatrixField& m, double scale = 1.0) {
    ScalarField out(m.points);
    for (std::size_t p = 0; p < m.points; ++p) {
        const Eigen::LLT<Matrix> llt(scale * m.at(p));
        if (llt.info() != Eigen::Success) {
            out[p] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double s = 0.0;
        for (int i = 0; i < m.n; ++i) s += 2.0 * std::log(llt.matrixL()(i, i).real());
        out[p] = s;
    }
    return out;
}

struct KrylovResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Restarted GMRES with right preconditioning, x0 = 0.
template <class Op, class Prec>
KrylovResult gmres(const Op& apply, const Prec& precondition, const std::vector<double>& b, std::vector<double>& x, double rtol,
          int restart, int max_iterations) {
    const std::size_t size = b.size();
    x.assign(size, 0.0);
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return {0, 0.0, true};
    std::vector<double> r = b;
    int total = 0;
    while (total < max_iterations) {
        const double beta = std::sqrt(dot(r, r));
        if (beta <= rtol * bnorm) return {total, beta / bnorm, true};
        std::vector<std::vector<double>> basis(1, r);
        for (double& v : basis[0]) v /= beta;
        std::vector<std::vector<double>> h;  // columns of the Hessenberg matrix
        std::vector<double> cs, sn, g{beta};
        int j = 0;
        for (; j < restart && total < max_iterations; ++j, ++total) {
            std::vector<double> w = apply(precondition(basis[static_cast<std::size_t>(j)]));
            std::vector<double> col(static_cast<std::size_t>(j + 2), 0.0);
            for (int i = 0; i <= j; ++i) {
                col[static_cast<std::size_t>(i)] = dot(w, basis[static_cast<std::size_t>(i)]);
                for (std::size_t q = 0; q < size; ++q) w[q] -= col[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(i)][q];
            }
            const double wn = std::sqrt(dot(w, w));
            col[static_cast<std::size_t>(j + 1)] = wn;
            for (int i = 0; i < j; ++i) {
                const double a = col[static_cast<std::size_t>(i)], c = col[static_cast<std::size_t>(i + 1)];
                col[static_cast<std::size_t>(i)] = cs[static_cast<std::size_t>(i)] * a + sn[static_cast<std::size_t>(i)] * c;
                col[static_cast<std::size_t>(i + 1)] = -sn[static_cast<std::size_t>(i)] * a + cs[static_cast<std::size_t>(i)] * c;
            }
            const double a = col[static_cast<std::size_t>(j)], c = col[static_cast<std::size_t>(j + 1)];
            const double rho = std::hypot(a, c);
            cs.push_back(rho == 0.0 ? 1.0 : a / rho);
            sn.push_back(rho == 0.0 ? 0.0 : c / rho);
            col[static_cast<std::size_t>(j)] = rho;
            col[static_cast<std::size_t>(j + 1)] = 0.0;
            g.push_back(-sn.back() * g[static_cast<std::size_t>(j)]);
            g[static_cast<std::size_t>(j)] *= cs.back();
            h.push_back(std::move(col));
            const bool done = std::abs(g[static_cast<std::size_t>(j + 1)]) <= rtol * bnorm;
            if (wn > 0.0 && !done) {
                for (double& v : w) v /= wn;
                basis.push_back(std::move(w));
            } else {
                ++j;
                ++total;
                break;
            }
        }
        // Back substitution and update.
        std::vector<double> y(static_cast<std::size_t>(j), 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < j; ++k) s -= h[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(k)];
            y[static_cast<std::size_t>(i)] = s / h[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        std::vector<double> z(size, 0.0);
        for (int i = 0; i < j; ++i)
            for (std::size_t q = 0; q < size; ++q) z[q] += y[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(i)][q];
        const std::vector<double> dx = precondition(z);
        for (std::size_t q = 0; q < size; ++q) x[q] += dx[q];
        const std::vector<double> ax = apply(x);
        for (std::size_t q = 0; q < size; ++q) r[q] = b[q] - ax[q];
    }
    const double rel = std::sqrt(dot(r, r)) / bnorm;
    return {total, rel, rel <= rtol};
}

}  // namespace detail

/// Sup-norm of log det(alpha + ddbar v) - log det omega - v - F for v = level + variation,
/// evaluated independently of the Newton iteration (Cholesky route). Infinity where
/// positivity fails.
inline double ma_residual(const MAProblem& problem, double level, std::span<const double> variation) {
    const auto& sp = *problem.spectral;
    const double scale = std::exp(-level / problem.dim());
    const ScalarField lhs = detail::cholesky_log_det(detail::add_ddbar(sp, problem.base, variation), scale);
    const ScalarField ref = detail::cholesky_log_det(problem.reference);
    double worst = 0.0;
    for (std::size_t p = 0; p < lhs.size(); ++p) {
        const double r = lhs[p] - ref[p] - variation[p] - problem.datum[p];
        if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

inline double ma_residual(const MAProblem& problem, std::span<const double> v) {
    const double level = grid_mean(v);
    std::vector<double> w(v.begin(), v.end());
    for (double& x : w) x -= level;
    return ma_residual(problem, level, w);
}

/// Newton solve from the starting point level + variation.
inline SolveReport solve_ma(const MAProblem& problem, const NewtonOptions& opt, double level, ScalarField variation) {
    problem.validate();
    if (!(opt.tol > 0.0)) throw InvalidArgument("solve_ma: tol must be positive");
    const auto& sp = *problem.spectral;
    const std::size_t pts = sp.size();
    const int n = problem.dim();
    if (variation.size() != pts) throw DimensionMismatch("solve_ma: initial guess size");

    const detail::LogDet ref = detail::eigen_log_det(problem.reference);
    if (!ref.positive) throw PositivityLoss(ref.worst_point, ref.min_eigenvalue, "solve_ma: reference metric");
    ScalarField fixed(pts);
    for (std::size_t p = 0; p < pts; ++p) fixed[p] = ref.value[p] + problem.datum[p];
    // log det(alpha + ddbar v) - v = log det(scale (alpha + ddbar w)) - w with v = level + w.
    const double scale = std::exp(-level / n);

    struct Eval {
        MatrixField form;
        detail::LogDet logdet;
        ScalarField residual;
        double sup = std::numeric_limits<double>::infinity();
    };
    auto evaluate = [&](const ScalarField& w) {
        Eval e;
        e.form = detail::add_ddbar(sp, problem.base, w);
        e.logdet = detail::eigen_log_det(e.form, scale);
        if (!e.logdet.positive) return e;
        e.residual.resize(pts);
        for (std::size_t p = 0; p < pts; ++p) e.residual[p] = e.logdet.value[p] - w[p] - fixed[p];
        e.sup = detail::sup_abs(e.residual);
        return e;
    };

    SolveReport rep;
    ScalarField v = std::move(variation);
    Eval cur = evaluate(v);
    if (!cur.logdet.positive)
        throw PositivityLoss(cur.logdet.worst_point, cur.logdet.min_eigenvalue / scale, "solve_ma: initial guess");
    // Newton stops a little below tol so the independent re-check cannot flip the verdict.
    const double target = 0.5 * opt.tol;
    int polish_left = opt.polish_steps;
    for (int it = 0;; ++it) {
        rep.residuals.push_back(cur.sup);
        const bool polishing = cur.sup <= target;
        if (polishing && polish_left-- <= 0) break;
        if (!polishing && it == opt.max_iterations) throw NonConvergence("solve_ma: Newton iteration limit", it, cur.sup);

        // Linearization at the current form, scaled on the left by n / tr(M^{-1}) so the
        // principal part is close to the flat Laplacian (exactly so for n = 1).
        MatrixField inv(n, pts);
        ScalarField weight(pts);
        for (std::size_t p = 0; p < pts; ++p) {
            const Matrix mi = cur.form.at(p).inverse();
            inv.set(p, mi);
            weight[p] = n / mi.trace().real();
        }
        const double weight_mean = grid_mean(weight);
        auto apply = [&](const std::vector<double>& d) {
            const MatrixField h = detail::ddbar_centered(sp, d);
            std::vector<double> out(pts);
            for (std::size_t p = 0; p < pts; ++p) {
                double s = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) s += (inv(p, j, i) * h(p, i, j)).real();
                out[p] = weight[p] * (s - d[p]);
            }
            return out;
        };
        auto precondition = [&](const std::vector<double>& r) {
            auto c = sp.forward(r);
            for (std::size_t m = 0; m < pts; ++m) c[m] /= sp.laplacian_symbol(m) - weight_mean;
            sp.backward(c);
            return real_part(c);
        };
        std::vector<double> rhs(pts), step;
        for (std::size_t p = 0; p < pts; ++p) rhs[p] = -weight[p] * cur.residual[p];
        // Forcing term min(cap, residual) gives the quadratic tail; polishing only needs a
        // modest relative accuracy because the residual is already tiny.
        const double rtol = polishing ? 1e-6 : std::max(1e-12, std::min(opt.forcing_cap, cur.sup));
        const detail::KrylovResult kr =
            detail::gmres(apply, precondition, rhs, step, rtol, opt.krylov_restart, opt.krylov_max_iterations);
        rep.linear_iterations += kr.iterations;
        if (polishing) {
            ScalarField trial(pts);
            for (std::size_t p = 0; p < pts; ++p) trial[p] = v[p] + step[p];
            Eval e = evaluate(trial);
            if (!e.logdet.positive || !(e.sup < 0.5 * cur.sup)) break;
            v = std::move(trial);
            cur = std::move(e);
            rep.iterations = it + 1;
            continue;
        }
        // A linear solve that stalls short of its target still yields a usable direction;
        // the line search judges it. Only a solve that made no progress is fatal.
        if (!kr.converged && !(kr.relative_residual < 0.5))
            throw NonConvergence("solve_ma: linear solve made no progress at Newton step " + std::to_string(it), kr.iterations,
                                 cur.sup);

        // Backtracking on the sup-norm, positivity checked at every trial.
        double t = 1.0;
        bool accepted = false, lost_positivity = false;
        detail::LogDet last_bad;
        for (int hv = 0; hv <= opt.max_halvings; ++hv, t *= 0.5) {
            ScalarField trial(pts);
            for (std::size_t p = 0; p < pts; ++p) trial[p] = v[p] + t * step[p];
            Eval e = evaluate(trial);
            if (!e.logdet.positive) {
                lost_positivity = true;
                last_bad = e.logdet;
                continue;
            }
            lost_positivity = false;
            if (e.sup < (1.0 - 1e-4 * t) * cur.sup) {
                v = std::move(trial);
                cur = std::move(e);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (lost_positivity)
                throw PositivityLoss(last_bad.worst_point, last_bad.min_eigenvalue / scale,
                                     "solve_ma: every damped trial at Newton step " + std::to_string(it) + " leaves the positive cone");
            throw NonConvergence("solve_ma: line search stalled at Newton step " + std::to_string(it), it, cur.sup);
        }
        rep.iterations = it + 1;
    }
    rep.verified_residual = ma_residual(problem, level, v);
    if (!(rep.verified_residual <= opt.tol))
        throw NonConvergence("solve_ma: independent residual check failed", rep.iterations, rep.verified_residual);
    rep.level = level;
    rep.v.resize(pts);
    for (std::size_t p = 0; p < pts; ++p) rep.v[p] = level + v[p];
    rep.variation = std::move(v);
    return rep;
}

inline SolveReport solve_ma(const MAProblem& problem, const NewtonOptions& opt, ScalarField guess = {}) {
    if (guess.empty()) guess.assign(problem.spectral ? problem.spectral->size() : 0, 0.0);
    const double level = grid_mean(guess);
    for (double& x : guess) x -= level;
    return solve_ma(problem, opt, level, std::move(guess));
}

inline SolveReport solve_ma(const MAProblem& problem, double tol) {
    NewtonOptions opt;
    opt.tol = tol;
    return solve_ma(problem, opt);
}

// ---------------------------------------------------------------------------
// Continuity path

struct ContinuityDiagnostics {
    double sup_u = 0.0;
    double log_C = 0.0;  // log sup (eps_0 omega + ddbar log det omega)^n / omega^n
    double ricci_residual = 0.0;
    double ma_residual = 0.0;       // sup |log omega_eps^n - u - log omega^n|
    double volume = 0.0;            // integral of omega_eps^n
    double volume_from_u = 0.0;     // integral of exp(u) omega^n
    double min_relative_eigenvalue = 0.0;  // of omega_eps against omega
    double max_relative_eigenvalue = 0.0;
    double S_min = 0.0;  // S = tr_{omega_eps} omega
    double S_max = 0.0;
    std::vector<double> newton_residuals;
    int newton_iterations = 0;
    int linear_iterations = 0;
    double wall_seconds = 0.0;
};

struct ContinuityState {
    double epsilon = 0.0;
    ScalarField u, v, f;  // u = f + v
    double v_level = 0.0;    // v = v_level + v_variation; the Ricci residual reads the
    ScalarField v_variation;  // variation directly, so corrupting it is what gets detected
    MatrixField omega_eps;
    ScalarField S;
    ContinuityDiagnostics diag;
};

enum class WarmStart {
    Rescaled,  // start from (eps_new / eps_prev) * omega_prev, always positive
    Previous,  // reuse v from the previous epsilon unchanged
};

struct ContinuityOptions {
    // Polishing keeps the node residual at roundoff so the oversampled Ricci
    // residual measures discretization error rather than the stopping tolerance.
    NewtonOptions newton = [] {
        NewtonOptions o;
        o.polish_steps = 3;
        return o;
    }();
    WarmStart warm_start = WarmStart::Rescaled;
    bool compute_ricci_residual = true;
    std::function<void(const ContinuityState&)> on_state;
};

inline std::vector<double> geometric_schedule(double eps0, double ratio, int count) {
    if (!(eps0 > 0.0) || !(ratio > 0.0 && ratio < 1.0) || count < 1)
        throw InvalidArgument("geometric_schedule: need eps0 > 0, 0 < ratio < 1, count >= 1");
    std::vector<double> s;
    for (int k = 0; k < count; ++k) s.push_back(eps0 * std::pow(ratio, k));
    return s;
}

namespace detail {

inline int oversampled_N(const TorusGrid& grid) {
    return std::pow(2.0 * grid.N, grid.real_dims()) <= kOversampleBudget ? 2 * grid.N : grid.N;
}

inline ScalarField log_det_metric(const MetricField& omega) {
    const LogDet ld = eigen_log_det(omega.metric());
    if (!ld.positive) throw PositivityLoss(ld.worst_point, ld.min_eigenvalue, "reference metric");
    return ld.value;
}

}  // namespace detail

/// log C with C = sup (eps0 omega + ddbar log det omega)^n / omega^n.
inline double log_max_principle_constant(const MetricField& omega, double eps0) {
    const MatrixField& g = omega.metric();
    const FormField ric_form = ricci_form(omega);
    const MatrixField& ric = ric_form.grid_values();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < g.points; ++p) {
        const Matrix m = eps0 * g.at(p) - ric.at(p);
        best = std::max(best, m.determinant().real() / g.at(p).determinant().real());
    }
    if (!(best > 0.0)) throw InvalidArgument("max-principle constant: eps0 omega + ddbar log det omega is nowhere positive");
    return std::log(best);
}

namespace detail {

struct OversampledState {
    std::shared_ptr<const TorusSpectral> fine;
    MatrixField base;    // eps omega
    MatrixField form;    // omega_eps
    MatrixField ricci;   // Ric(omega_eps)
    bool positive = true;
};

/// omega_eps and its Ricci form on the 2x grid, rebuilt from the state's potential
/// through the trigonometric interpolants (Nyquist content dropped first).
inline OversampledState oversample_state(const ContinuityState& state, const MetricField& omega) {
    const auto& sp = omega.spectral();
    const TorusGrid grid = sp.grid();
    const int n = grid.n;
    const int fine_N = oversampled_N(grid);
    OversampledState out;
    out.fine = torus_spectral({n, fine_N});
    ScalarField v = state.v_variation;
    if (v.empty()) {
        v.resize(state.u.size());
        for (std::size_t p = 0; p < v.size(); ++p) v[p] = state.u[p] - state.f[p];
    }
    const double v_mean = grid_mean(v);
    for (double& x : v) x -= v_mean;
    auto vc = sp.forward(v);
    auto pc = omega.potential_coeffs();
    sp.drop_nyquist(vc);
    sp.drop_nyquist(pc);
    MatrixField g = out.fine->ddbar_coeffs(sp.pad_coefficients(pc, fine_N));
    for (std::size_t p = 0; p < g.points; ++p)
        for (int i = 0; i < n; ++i) g(p, i, i) += 1.0;
    const MatrixField dv = out.fine->ddbar_coeffs(sp.pad_coefficients(vc, fine_N));
    out.base = MatrixField(n, g.points);
    out.form = MatrixField(n, g.points);
    for (std::size_t q = 0; q < g.data.size(); ++q) {
        out.base.data[q] = state.epsilon * g.data[q];
        out.form.data[q] = out.base.data[q] + dv.data[q];
    }
    // Scaling by 1/eps only shifts log det by a constant.
    const LogDet ld = eigen_log_det(out.form, 1.0 / state.epsilon);
    out.positive = ld.positive;
    if (!ld.positive) return out;
    out.ricci = ddbar_centered(*out.fine, ld.value);
    for (auto& x : out.ricci.data) x = -x;
    return out;
}

/// Fine-grid index of coarse node p (every other node per axis).
inline std::size_t fine_index(const TorusGrid& coarse, int fine_N, std::size_t p) {
    std::size_t q = 0, stride = 1;
    for (int d = 0; d < coarse.real_dims(); ++d) {
        q += (p % static_cast<std::size_t>(coarse.N)) * static_cast<std::size_t>(fine_N / coarse.N) * stride;
        p /= static_cast<std::size_t>(coarse.N);
        stride *= static_cast<std::size_t>(fine_N);
    }
    return q;
}

}  // namespace detail

/// Sup over an oversampled grid of |Ric(omega_eps) + omega_eps - eps omega| (matrix entries).
inline double ricci_residual(const ContinuityState& state, const MetricField& omega) {
    const detail::OversampledState os = detail::oversample_state(state, omega);
    if (!os.positive) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t q = 0; q < os.form.data.size(); ++q)
        worst = std::max(worst, std::abs(os.ricci.data[q] + os.form.data[q] - os.base.data[q]));
    return worst;
}

/// Ric(omega_eps) at the grid nodes.
inline MatrixField state_ricci_form(const ContinuityState& state, const MetricField& omega) {
    const detail::OversampledState os = detail::oversample_state(state, omega);
    if (!os.positive) throw PositivityLoss(0, 0.0, "state_ricci_form: omega_eps not positive on the oversampled grid");
    const TorusGrid grid = omega.spectral().grid();
    MatrixField out(grid.n, grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) out.set(p, os.ricci.at(detail::fine_index(grid, os.fine->grid().N, p)));
    return out;
}

namespace detail {

inline std::string eps_context(double eps) {
    std::ostringstream os;
    os.precision(17);
    os << " [epsilon = " << eps << "]";
    return os.str();
}

}  // namespace detail

/// Walk the family omega_eps = eps omega + dd^c log omega^n + dd^c u_eps along a descending schedule.
/// On the torus f_eps = -log(omega^n / flat^n), so the base form of each equation is exactly eps omega.
inline std::vector<ContinuityState> continuity_path(const MetricField& omega, const std::vector<double>& epsilons,
                                                    const ContinuityOptions& opt = {}) {
    if (!omega.is_torus()) throw InvalidArgument("continuity_path: torus metric field required");
    if (epsilons.empty()) throw InvalidArgument("continuity_path: empty schedule");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (!(epsilons[k] > 0.0)) throw InvalidArgument("continuity_path: epsilons must be positive");
        if (k > 0 && !(epsilons[k] < epsilons[k - 1])) throw InvalidArgument("continuity_path: schedule must be strictly descending");
    }
    const auto sp = omega.spectral_ptr();
    const std::size_t pts = sp->size();
    const int n = omega.dim();
    const MatrixField& g = omega.metric();
    const ScalarField logdet_g = detail::log_det_metric(omega);
    ScalarField f(pts);
    for (std::size_t p = 0; p < pts; ++p) f[p] = -logdet_g[p];
    const double log_C = log_max_principle_constant(omega, epsilons.front());

    std::vector<ContinuityState> path;
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        const double eps = epsilons[k];
        MAProblem prob{sp, g, g, f};
        for (auto& x : prob.base.data) x *= eps;

        double level = n * std::log(eps);
        ScalarField variation(pts, 0.0);
        if (k > 0) {
            const ContinuityState& prev = path.back();
            if (opt.warm_start == WarmStart::Previous) {
                level = prev.v_level;
                variation = prev.v_variation;
            } else {
                // v -> n log r + mean + r (v - mean) turns omega_prev into r omega_prev.
                const double r = eps / prev.epsilon;
                const double mean = grid_mean(prev.v_variation);
                level = prev.v_level + n * std::log(r);
                for (std::size_t p = 0; p < pts; ++p) variation[p] = mean + r * (prev.v_variation[p] - mean);
            }
        }
        SolveReport rep;
        try {
            rep = solve_ma(prob, opt.newton, level, std::move(variation));
        } catch (const PositivityLoss& e) {
            throw PositivityLoss(e.point(), e.min_eigenvalue(), e.context() + detail::eps_context(eps));
        } catch (const NonConvergence& e) {
            throw NonConvergence(e.context() + detail::eps_context(eps), e.iterations(), e.residual());
        }

        ContinuityState st;
        st.epsilon = eps;
        st.v = std::move(rep.v);
        st.v_level = rep.level;
        st.v_variation = std::move(rep.variation);
        st.f = f;
        st.u.resize(pts);
        for (std::size_t p = 0; p < pts; ++p) st.u[p] = st.f[p] + st.v[p];
        st.omega_eps = detail::add_ddbar(*sp, prob.base, st.v_variation);

        auto& d = st.diag;
        d.log_C = log_C;
        d.sup_u = *std::max_element(st.u.begin(), st.u.end());
        d.newton_residuals = rep.residuals;
        d.newton_iterations = rep.iterations;
        d.linear_iterations = rep.linear_iterations;
        const ScalarField ld = detail::cholesky_log_det(st.omega_eps);
        ScalarField vol(pts), vol_u(pts);
        st.S.resize(pts);
        d.min_relative_eigenvalue = std::numeric_limits<double>::infinity();
        d.max_relative_eigenvalue = 0.0;
        d.ma_residual = 0.0;
        for (std::size_t p = 0; p < pts; ++p) {
            d.ma_residual = std::max(d.ma_residual, std::abs(ld[p] - st.u[p] - logdet_g[p]));
            vol[p] = st.omega_eps.at(p).determinant().real();
            vol_u[p] = std::exp(st.u[p] + logdet_g[p]);
            const HermitianMetric gw(g.at(p)), ge(st.omega_eps.at(p));
            const auto lam = relative_eigenvalues(gw, ge);
            d.min_relative_eigenvalue = std::min(d.min_relative_eigenvalue, lam.front());
            d.max_relative_eigenvalue = std::max(d.max_relative_eigenvalue, lam.back());
            st.S[p] = trace_S(gw, ge);
        }
        d.volume = grid_mean(vol);
        d.volume_from_u = grid_mean(vol_u);
        d.S_min = *std::min_element(st.S.begin(), st.S.end());
        d.S_max = *std::max_element(st.S.begin(), st.S.end());
        if (opt.compute_ricci_residual) d.ricci_residual = ricci_residual(st, omega);
        d.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (opt.on_state) opt.on_state(st);
        path.push_back(std::move(st));
    }
    return path;
}

struct LimitReport {
    std::vector<double> epsilons;
    std::vector<double> cauchy;         // sup |(u_{k+1} - n log eps_{k+1}) - (u_k - n log eps_k)|
    std::vector<double> predicted_gap;  // sup |u_k - n log eps_k - (log mean det g - log det g)|
    bool converging = false;
    std::string note;
};

/// Behaviour of the path as eps decreases. On the torus the class of dd^c log omega^n is zero,
/// so the eps = 0 equation has no solution: u_eps degenerates like n log eps, and the shifted
/// potentials u_eps - n log eps converge to log(mean det g) - log det g.
inline LimitReport limit_probe(const std::vector<ContinuityState>& path, const MetricField& omega) {
    LimitReport rep;
    if (path.empty()) return rep;
    const int n = omega.dim();
    const ScalarField logdet_g = detail::log_det_metric(omega);
    ScalarField det(logdet_g.size());
    for (std::size_t p = 0; p < det.size(); ++p) det[p] = std::exp(logdet_g[p]);
    const double log_mean = std::log(grid_mean(det));
    for (const auto& st : path) {
        rep.epsilons.push_back(st.epsilon);
        double gap = 0.0;
        for (std::size_t p = 0; p < st.u.size(); ++p)
            gap = std::max(gap, std::abs(st.u[p] - n * std::log(st.epsilon) - (log_mean - logdet_g[p])));
        rep.predicted_gap.push_back(gap);
    }
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        double c = 0.0;
        const double s0 = n * std::log(path[k].epsilon), s1 = n * std::log(path[k + 1].epsilon);
        for (std::size_t p = 0; p < path[k].u.size(); ++p) c = std::max(c, std::abs((path[k + 1].u[p] - s1) - (path[k].u[p] - s0)));
        rep.cauchy.push_back(c);
    }
    if (rep.cauchy.empty()) {
        rep.note = "single state: nothing to compare";
        return rep;
    }
    // Converging: successive differences shrink (or already sit at roundoff).
    rep.converging = true;
    for (std::size_t k = 1; k < rep.cauchy.size(); ++k)
        if (rep.cauchy[k] > 1e-10 && rep.cauchy[k] > rep.cauchy[k - 1]) rep.converging = false;
    rep.note = "torus: c1 = 0, u_eps ~ n log eps -> -infinity; the eps = 0 equation has no solution";
    return rep;
}

}  // namespace kahler
