#pragma once

// Rank-4 curvature tensors R_{ij̄kl̄} with Kähler symmetries, and holomorphic
// sectional curvature extremization over directions at a single point.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "kahler/hermitian.hpp"

namespace kahler {

class KahlerCurvature {
public:
    explicit KahlerCurvature(int n) : n_(n), r_(static_cast<std::size_t>(n * n * n * n), cd{}) {
        if (n < 1 || n > kMaxDim) throw DimensionMismatch("KahlerCurvature: n must be 1..3");
    }

    int dim() const { return n_; }

    cd& operator()(int i, int j, int k, int l) { return r_[index(i, j, k, l)]; }
    cd operator()(int i, int j, int k, int l) const { return r_[index(i, j, k, l)]; }

    /// R_{ij̄} = g^{kl̄} R_{ij̄kl̄} with g^{kl̄} = (g^{-1})_{lk}.
    Matrix ricci(const Matrix& g) const {
        const Matrix ginv = g.inverse();
        Matrix ric = Matrix::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int l = 0; l < n_; ++l) ric(i, j) += ginv(l, k) * (*this)(i, j, k, l);
        return ric;
    }

    /// R(eta, eta-bar, eta, eta-bar).
    double quartic(const Vector& eta) const {
        cd acc{};
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int l = 0; l < n_; ++l)
                        acc += (*this)(i, j, k, l) * eta(i) * std::conj(eta(j)) * eta(k) * std::conj(eta(l));
        return acc.real();
    }

    /// d/d(eta-bar_l) of the quartic form.
    Vector quartic_gradient(const Vector& eta) const {
        Vector grad = Vector::Zero(n_);
        for (int l = 0; l < n_; ++l) {
            cd acc{};
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    for (int k = 0; k < n_; ++k)
                        acc += (*this)(i, j, k, l) * eta(i) * std::conj(eta(j)) * eta(k);
            grad(l) = 2.0 * acc;
        }
        return grad;
    }

    /// Components in new coordinates z = T w.
    KahlerCurvature transformed(const Matrix& t) const {
        KahlerCurvature out(n_);
        // One index at a time keeps this O(n^5).
        auto step = [&](const KahlerCurvature& in, int slot) {
            KahlerCurvature res(n_);
            const bool barred = slot % 2 == 1;
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b)
                    for (int c = 0; c < n_; ++c)
                        for (int d = 0; d < n_; ++d) {
                            int idx[4] = {a, b, c, d};
                            cd acc{};
                            for (int m = 0; m < n_; ++m) {
                                int src[4] = {a, b, c, d};
                                src[slot] = m;
                                const cd factor = barred ? std::conj(t(m, idx[slot])) : t(m, idx[slot]);
                                acc += factor * in(src[0], src[1], src[2], src[3]);
                            }
                            res(a, b, c, d) = acc;
                        }
            return res;
        };
        out = step(*this, 0);
        out = step(out, 1);
        out = step(out, 2);
        out = step(out, 3);
        return out;
    }

    /// Largest violation of the Kähler symmetries, relative to the largest entry.
    double symmetry_residual() const {
        double worst = 0.0;
        double scale = 0.0;
        for (const cd& v : r_) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int l = 0; l < n_; ++l) {
                        const cd v = (*this)(i, j, k, l);
                        worst = std::max(worst, std::abs(v - (*this)(k, j, i, l)));
                        worst = std::max(worst, std::abs(v - (*this)(i, l, k, j)));
                        worst = std::max(worst, std::abs(v - std::conj((*this)(j, i, l, k))));
                    }
        return scale > 0.0 ? worst / scale : 0.0;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cd& v : r_) m = std::max(m, std::abs(v));
        return m;
    }

    KahlerCurvature& operator+=(const KahlerCurvature& other) {
        for (std::size_t q = 0; q < r_.size(); ++q) r_[q] += other.r_[q];
        return *this;
    }
    KahlerCurvature& operator*=(double s) {
        for (cd& v : r_) v *= s;
        return *this;
    }

private:
    std::size_t index(int i, int j, int k, int l) const {
        return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
    }

    int n_;
    std::vector<cd> r_;
};

/// Constant holomorphic sectional curvature -c with respect to g:
/// R_{ij̄kl̄} = -(c/2)(g_{ij̄} g_{kl̄} + g_{il̄} g_{kj̄}).
inline KahlerCurvature constant_hsc_tensor(const Matrix& g, double c) {
    const int n = static_cast<int>(g.rows());
    KahlerCurvature r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) r(i, j, k, l) = -0.5 * c * (g(i, j) * g(k, l) + g(i, l) * g(k, j));
    return r;
}

/// Random tensor averaged over the symmetry group generated by i<->k, j<->l and
/// R_{ij̄kl̄} -> conj(R_{jīlk̄}).
template <class Rng>
KahlerCurvature random_kahler_symmetric(int n, Rng& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    KahlerCurvature raw(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) raw(i, j, k, l) = cd(normal(rng), normal(rng));
    KahlerCurvature sym(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const cd s = raw(i, j, k, l) + raw(k, j, i, l) + raw(i, l, k, j) + raw(k, l, i, j);
                    const cd t = raw(j, i, l, k) + raw(l, i, j, k) + raw(j, k, l, i) + raw(l, k, j, i);
                    sym(i, j, k, l) = (s + std::conj(t)) / 8.0;
                }
    return sym;
}

/// H(eta) = R(eta, eta-bar, eta, eta-bar) / ||eta||^4.
inline double holomorphic_sectional_curvature(const KahlerCurvature& r, const HermitianMetric& g, const Vector& eta) {
    if (eta.size() != r.dim() || g.dim() != r.dim()) throw DimensionMismatch("hsc: dimension mismatch");
    const double nrm2 = g.norm_squared(eta);
    if (!(nrm2 > 0.0)) throw InvalidArgument("hsc: zero direction");
    return r.quartic(eta) / (nrm2 * nrm2);
}

struct HscSearchOptions {
    int samples = 10000;
    int refine_steps = 50;
};

struct HscExtremes {
    double hmin = 0.0;
    double hmax = 0.0;
    Vector argmin;  // unit length in g
    Vector argmax;
};

namespace detail {

/// Deterministic unit vectors of C^n covering CP^{n-1}, first component real >= 0.
inline std::vector<Vector> projective_directions(int n, int count) {
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (n == 1) {
        Vector e(1);
        e(0) = 1.0;
        out.push_back(e);
        return out;
    }
    if (n == 2) {
        // Fibonacci lattice on S^2 pulled back through the Hopf map.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int q = 0; q < count; ++q) {
            const double zc = 1.0 - 2.0 * (q + 0.5) / count;
            const double theta = std::acos(std::clamp(zc, -1.0, 1.0));
            const double phi = golden * q;
            Vector e(2);
            e(0) = std::cos(theta / 2.0);
            e(1) = std::polar(std::sin(theta / 2.0), phi);
            out.push_back(e);
        }
        return out;
    }
    // n == 3: Kronecker sequence in [0,1)^4 with the plastic-number generalization
    // of the golden ratio, mapped to uniform simplex weights and two phases.
    double phi4 = 2.0;
    for (int it = 0; it < 64; ++it) phi4 = std::pow(1.0 + phi4, 1.0 / 5.0);
    double alpha[4];
    for (int d = 0; d < 4; ++d) alpha[d] = std::fmod(std::pow(1.0 / phi4, d + 1), 1.0);
    for (int q = 0; q < count; ++q) {
        double u[4];
        for (int d = 0; d < 4; ++d) u[d] = std::fmod(0.5 + alpha[d] * (q + 1), 1.0);
        const double s = std::sqrt(u[0]);
        const double a1 = 1.0 - s, a2 = s * (1.0 - u[1]), a3 = s * u[1];
        Vector e(3);
        e(0) = std::sqrt(a1);
        e(1) = std::polar(std::sqrt(a2), two_pi * u[2]);
        e(2) = std::polar(std::sqrt(a3), two_pi * u[3]);
        out.push_back(e);
    }
    return out;
}

/// Projected gradient refinement of the quartic on the unit sphere.
/// sign = +1 ascends, -1 descends. Returns the refined value.
inline double refine_direction(const KahlerCurvature& r, Vector& xi, double value, int steps, double sign) {
    double step = 0.5 / std::max(r.max_abs(), 1e-300);
    for (int it = 0; it < steps && step > 1e-18; ++it) {
        const Vector grad = r.quartic_gradient(xi);
        const Vector tangent = grad - 2.0 * value * xi;
        if (tangent.norm() < 1e-15 * std::max(1.0, std::abs(value))) break;
        bool improved = false;
        while (step > 1e-18) {
            Vector trial = xi + (sign * step) * tangent;
            trial /= trial.norm();
            const double tv = r.quartic(trial);
            if (sign * (tv - value) > 0.0) {
                xi = trial;
                value = tv;
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return value;
}

}  // namespace detail

/// Extremes of H over directions: a deterministic sample of CP^{n-1} followed by
/// projected-gradient refinement from the best sample. Ties keep the lowest index.
inline HscExtremes hsc_extremes(const KahlerCurvature& r, const HermitianMetric& g, const HscSearchOptions& opt = {}) {
    const int n = r.dim();
    if (g.dim() != n) throw DimensionMismatch("hsc_extremes: dimension mismatch");
    // Orthonormal frame for g; in it ||xi|| is Euclidean.
    const NormalFrame frame = normal_frame(g.matrix(), g.matrix());
    const Matrix& t = frame.transform;
    const KahlerCurvature rt = r.transformed(t);

    const auto dirs = detail::projective_directions(n, std::max(1, opt.samples));
    std::size_t imin = 0, imax = 0;
    double vmin = rt.quartic(dirs[0]), vmax = vmin;
    for (std::size_t q = 1; q < dirs.size(); ++q) {
        const double v = rt.quartic(dirs[q]);
        if (v < vmin) { vmin = v; imin = q; }
        if (v > vmax) { vmax = v; imax = q; }
    }
    Vector xmin = dirs[imin], xmax = dirs[imax];
    if (n > 1) {
        vmin = detail::refine_direction(rt, xmin, vmin, opt.refine_steps, -1.0);
        vmax = detail::refine_direction(rt, xmax, vmax, opt.refine_steps, +1.0);
    }
    return {vmin, vmax, t * xmin, t * xmax};
}

}  // namespace kahler
