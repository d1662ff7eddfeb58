#pragma once

// Curvature of metric fields: R_{ij̄kl̄}, Ricci forms, holomorphic sectional
// curvature and its extremes, and the uniform floor kappa_0.

#include <algorithm>
#include <functional>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include "kahler/curvature_tensor.hpp"
#include "kahler/geometry.hpp"

namespace kahler {

/// R_{ij̄kl̄} = -d_k d_lbar g_{ij̄} + g^{pq̄} (d_k g_{iq̄})(d_lbar g_{pj̄}).
inline KahlerCurvature curvature_from_local(const LocalMetric& lm) {
    const int n = lm.dim();
    const Matrix ginv = lm.g.inverse();
    KahlerCurvature r(n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const Matrix& dk = lm.dg[static_cast<std::size_t>(k)];
            const Matrix dl_bar = lm.dbar_g(l);
            const Matrix& second = lm.ddbar_g[static_cast<std::size_t>(k * n + l)];
            // (dk * ginv^T * dl_bar)(i, j) = sum_{p,q} dk(i,q) ginv(q,p) dl_bar(p,j)
            const Matrix quad = dk * ginv * dl_bar;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) r(i, j, k, l) = -second(i, j) + quad(i, j);
        }
    return r;
}

inline KahlerCurvature curvature_tensor(const MetricField& field, const Vector& point) {
    return curvature_from_local(field.local(point));
}

/// A (1,1)-form field: a grid of Hermitian matrices on the torus, or a pointwise
/// closed-form evaluator on a chart.
class FormField {
public:
    using Evaluator = std::function<Matrix(const Vector&)>;

    FormField(std::shared_ptr<const TorusSpectral> sp, MatrixField values)
        : spectral_(std::move(sp)), values_(std::move(values)) {}
    explicit FormField(Evaluator eval) : eval_(std::move(eval)) {}

    bool on_grid() const { return spectral_ != nullptr; }
    const MatrixField& grid_values() const {
        if (!on_grid()) throw InvalidArgument("FormField: not a grid field");
        return values_;
    }

    Matrix at(const Vector& z) const {
        if (!on_grid()) return eval_(z);
        const auto& grid = spectral_->grid();
        const int n = grid.n;
        // Node lookup, else trigonometric interpolation of each component.
        std::size_t idx = 0;
        bool node = true;
        std::vector<double> x;
        for (int i = 0; i < n; ++i)
            for (double c : {z(i).real(), z(i).imag()}) {
                x.push_back(c);
                const double s = c * grid.N;
                if (std::abs(s - std::round(s)) > 1e-9) node = false;
                idx = idx * static_cast<std::size_t>(grid.N) +
                      static_cast<std::size_t>((static_cast<long>(std::round(s)) % grid.N + grid.N) % grid.N);
            }
        if (node) return values_.at(idx);
        Matrix m(n, n);
        std::vector<cd> comp(values_.points);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                for (std::size_t p = 0; p < values_.points; ++p) comp[p] = values_(p, i, j);
                m(i, j) = spectral_->evaluate(spectral_->forward(comp), x, {{}})[0];
            }
        return m;
    }

private:
    std::shared_ptr<const TorusSpectral> spectral_;
    MatrixField values_;
    Evaluator eval_;
};

namespace detail {

inline Jet jet_det(const std::vector<std::vector<Jet>>& a) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0];
    if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

/// -d_i d_jbar log det(d_a d_bbar psi) through jets, independent of the curvature tensor.
inline Matrix chart_ricci(const ChartPotential& psi, int n, const Vector& z) {
    const Jet j = chart_jet(psi, n, z);
    std::vector<std::vector<Jet>> g(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) g[static_cast<std::size_t>(a)].push_back(j.differentiate(a).differentiate(n + b));
    const Jet logdet = log(jet_det(g));
    Matrix ric(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) ric(a, b) = -logdet.derivative(wirtinger_index(n, {a}, {b}));
    return ric;
}

}  // namespace detail

/// log det g on every torus node.
inline ScalarField log_det_field(const MatrixField& g) {
    ScalarField out(g.points);
    for (std::size_t p = 0; p < g.points; ++p) out[p] = std::log(g.at(p).determinant().real());
    return out;
}

inline constexpr double kOversampleBudget = 1 << 22;  // grid points

/// Ric(omega) = -dd^c log omega^n.
inline FormField ricci_form(const MetricField& field) {
    if (field.is_torus()) {
        const auto& sp = field.spectral();
        const TorusGrid grid = sp.grid();
        // log det g is not band-limited; evaluate it on a 2x grid when that fits,
        // then keep the values at the coarse nodes.
        const int fine_N = std::pow(2.0 * grid.N, grid.real_dims()) <= kOversampleBudget ? 2 * grid.N : grid.N;
        if (fine_N == grid.N) {
            MatrixField ric = sp.ddbar(log_det_field(field.metric()));
            for (auto& v : ric.data) v = -v;
            return FormField(field.spectral_ptr(), std::move(ric));
        }
        const auto fine = torus_spectral({grid.n, fine_N});
        auto pc = field.potential_coeffs();
        sp.drop_nyquist(pc);
        MatrixField g = fine->ddbar_coeffs(sp.pad_coefficients(pc, fine_N));
        for (std::size_t p = 0; p < g.points; ++p)
            for (int i = 0; i < grid.n; ++i) g(p, i, i) += 1.0;
        ScalarField logdet(g.points);
        for (std::size_t p = 0; p < g.points; ++p) {
            const double det = g.at(p).determinant().real();
            if (!(det > 0.0)) throw PositivityLoss(p, det, "ricci_form: oversampled metric");
            logdet[p] = std::log(det);
        }
        const MatrixField fine_ric = fine->ddbar(logdet);
        MatrixField ric(grid.n, grid.size());
        for (std::size_t p = 0; p < grid.size(); ++p) {
            std::size_t rest = p, q = 0, stride = 1;
            for (int d = 0; d < grid.real_dims(); ++d) {
                q += 2 * (rest % static_cast<std::size_t>(grid.N)) * stride;
                rest /= static_cast<std::size_t>(grid.N);
                stride *= static_cast<std::size_t>(fine_N);
            }
            ric.set(p, -fine_ric.at(q));
        }
        return FormField(field.spectral_ptr(), std::move(ric));
    }
    const auto psi = field.chart_potential();
    const int n = field.dim();
    return FormField([field, psi, n](const Vector& z) {
        field.require_trusted(z);
        return detail::chart_ricci(psi, n, z);
    });
}

inline double hsc(const MetricField& field, const Vector& point, const Direction& eta) {
    if (eta.dim() != field.dim()) throw DimensionMismatch("hsc: direction dimension");
    const LocalMetric lm = field.local(point);
    return holomorphic_sectional_curvature(curvature_from_local(lm), HermitianMetric(lm.g), eta.vector());
}

inline HscExtremes hsc_extremes(const MetricField& field, const Vector& point, const HscSearchOptions& opt = {}) {
    const LocalMetric lm = field.local(point);
    return hsc_extremes(curvature_from_local(lm), HermitianMetric(lm.g), opt);
}

struct KappaOptions {
    HscSearchOptions search{400, 50};
    /// Torus: nodes visited (evenly strided); chart: trusted-region samples.
    int max_points = 4096;
};

struct KappaFloor {
    double kappa0 = 0.0;
    Vector worst_point;   // where -Hmax is smallest
    double worst_hmax = 0.0;
    std::size_t samples = 0;
    std::size_t nonnegative_hmax_points = 0;  // points with Hmax >= 0
};

/// kappa_0 = min over sample points of -Hmax(P).
inline KappaFloor kappa_floor(const MetricField& field, const KappaOptions& opt = {}) {
    KappaFloor out;
    out.kappa0 = std::numeric_limits<double>::infinity();
    const auto pts = field.trusted_samples(opt.max_points);
    for (const auto& z : pts) {
        const HscExtremes e = hsc_extremes(field, z, opt.search);
        if (e.hmax >= 0.0) ++out.nonnegative_hmax_points;
        if (-e.hmax < out.kappa0) {
            out.kappa0 = -e.hmax;
            out.worst_point = z;
            out.worst_hmax = e.hmax;
        }
    }
    out.samples = pts.size();
    return out;
}

}  // namespace kahler
