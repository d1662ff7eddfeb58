#pragma once

// Metric fields over the two substrates: the flat torus (metric delta + ddbar psi
// with psi sampled on a grid, derivatives spectral) and analytic charts (psi a
// closed-form expression, derivatives exact through jets).
//
// A (1,1)-form a is identified with the Hermitian matrix a_{ij̄} through
// a = (sqrt(-1)/2pi) a_{ij̄} dz^i ^ dz-bar^j, so dd^c psi is the matrix of
// Wirtinger second derivatives d_i d_jbar psi with no extra factors, and
// Ric(omega) = -dd^c log omega^n is the matrix -d_i d_jbar log det g.

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kahler/error.hpp"
#include "kahler/hermitian.hpp"
#include "kahler/jet.hpp"
#include "kahler/spectral.hpp"

namespace kahler {

/// Relative positivity threshold for metric fields.
inline constexpr double kFieldDegeneracy = 1e-10;

enum class SubstrateKind { PeriodicTorus, AnalyticChart };

/// Polydisk |z_i - center_i| < radius; derivatives are trusted where
/// |z_i - center_i| <= radius - margin.
struct ChartDomain {
    Vector center;
    double radius = 1.0;
    double margin = 0.1;

    double trusted_radius() const { return radius - margin; }
};

struct Geometry {
    SubstrateKind kind = SubstrateKind::PeriodicTorus;
    int n = 1;
    TorusGrid grid{};
    ChartDomain chart{};

    static Geometry torus(int n, int N) {
        if (N < 8 || N % 2 != 0) throw InvalidArgument("torus resolution must be even and >= 8");
        if (n < 1 || n > kMaxDim) throw InvalidArgument("torus dimension must be 1..3");
        return {SubstrateKind::PeriodicTorus, n, {n, N}, {}};
    }
    static Geometry analytic_chart(int n, Vector center, double radius, double margin) {
        if (n < 1 || n > kMaxDim || center.size() != n) throw InvalidArgument("chart dimension must be 1..3");
        if (!(margin > 0.0) || !(radius > margin)) throw InvalidArgument("chart margin must be positive and below the radius");
        return {SubstrateKind::AnalyticChart, n, {}, {std::move(center), radius, margin}};
    }
    bool is_torus() const { return kind == SubstrateKind::PeriodicTorus; }
};

/// Closed-form potential psi(z, w) with w standing in for conj(z); must be real
/// on w = conj(z).
using ChartPotential = std::function<Jet(std::span<const Jet> z, std::span<const Jet> w)>;

/// Metric and its derivatives at one point: g_{ij̄}, d_k g_{ij̄}, d_k d_lbar g_{ij̄}.
struct LocalMetric {
    Matrix g;
    std::vector<Matrix> dg;      // dg[k](i, j) = d_k g_{ij̄}
    std::vector<Matrix> ddbar_g; // ddbar_g[k * n + l](i, j) = d_k d_lbar g_{ij̄}

    int dim() const { return static_cast<int>(g.rows()); }
    /// d_lbar g_{ij̄} = conj(d_l g_{jī}).
    Matrix dbar_g(int l) const { return dg[static_cast<std::size_t>(l)].adjoint(); }
};

namespace detail {

inline MultiIndex wirtinger_index(int n, std::initializer_list<int> zs, std::initializer_list<int> ws) {
    MultiIndex m{};
    for (int i : zs) ++m[static_cast<std::size_t>(i)];
    for (int j : ws) ++m[static_cast<std::size_t>(n + j)];
    return m;
}

inline Jet chart_jet(const ChartPotential& psi, int n, const Vector& z0) {
    const JetLayout& layout = jet_layout(2 * n);
    std::vector<Jet> z, w;
    for (int i = 0; i < n; ++i) z.push_back(Jet::variable(layout, i, z0(i)));
    for (int i = 0; i < n; ++i) w.push_back(Jet::variable(layout, n + i, std::conj(z0(i))));
    return psi(z, w);
}

inline LocalMetric local_from_jet(const Jet& j, int n) {
    LocalMetric lm;
    lm.g = Matrix(n, n);
    lm.dg.assign(static_cast<std::size_t>(n), Matrix(n, n));
    lm.ddbar_g.assign(static_cast<std::size_t>(n * n), Matrix(n, n));
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
            lm.g(i, jj) = j.derivative(wirtinger_index(n, {i}, {jj}));
            for (int k = 0; k < n; ++k) {
                lm.dg[static_cast<std::size_t>(k)](i, jj) = j.derivative(wirtinger_index(n, {i, k}, {jj}));
                for (int l = 0; l < n; ++l)
                    lm.ddbar_g[static_cast<std::size_t>(k * n + l)](i, jj) = j.derivative(wirtinger_index(n, {i, k}, {jj, l}));
            }
        }
    return lm;
}

}  // namespace detail

class MetricField {
public:
    /// Torus field from mean-zero potential samples over the flat background.
    MetricField(Geometry geom, ScalarField psi) : state_(std::make_shared<State>()) {
        if (!geom.is_torus()) throw InvalidArgument("MetricField: grid potential requires a torus geometry");
        state_->geom = std::move(geom);
        state_->spectral = torus_spectral(state_->geom.grid);
        const auto& sp = *state_->spectral;
        if (psi.size() != sp.size()) throw DimensionMismatch("potential size does not match grid");
        const double mean = grid_mean(psi);
        for (double& v : psi) v -= mean;
        state_->psi = std::move(psi);
        state_->coeffs = sp.forward(state_->psi);
        state_->coeffs[0] = 0.0;
        state_->metric = sp.ddbar_coeffs(state_->coeffs);
        const int n = state_->geom.n;
        for (std::size_t p = 0; p < sp.size(); ++p)
            for (int i = 0; i < n; ++i) state_->metric(p, i, i) += 1.0;
        check_positive();
    }

    /// Chart field from a closed-form potential.
    MetricField(Geometry geom, ChartPotential psi, int positivity_samples = 64) : state_(std::make_shared<State>()) {
        if (geom.is_torus()) throw InvalidArgument("MetricField: closed-form potential requires a chart geometry");
        state_->geom = std::move(geom);
        state_->chart_psi = std::move(psi);
        const auto pts = trusted_samples(positivity_samples);
        for (std::size_t q = 0; q < pts.size(); ++q) {
            const Matrix g = metric_at(pts[q]);
            const RealVector ev = hermitian_eigenvalues(g);
            if (!(ev(0) > kFieldDegeneracy * ev.cwiseAbs().maxCoeff())) throw PositivityLoss(q, ev(0), "chart sample");
        }
    }

    const Geometry& geometry() const { return state_->geom; }
    int dim() const { return state_->geom.n; }
    bool is_torus() const { return state_->geom.is_torus(); }

    // Torus accessors.
    const TorusSpectral& spectral() const { return *torus_state().spectral; }
    std::shared_ptr<const TorusSpectral> spectral_ptr() const { return torus_state().spectral; }
    const ScalarField& potential() const { return torus_state().psi; }
    const std::vector<cd>& potential_coeffs() const { return torus_state().coeffs; }
    const MatrixField& metric() const { return torus_state().metric; }

    const ChartPotential& chart_potential() const {
        if (is_torus()) throw InvalidArgument("chart_potential: torus field");
        return state_->chart_psi;
    }

    bool in_trusted_region(const Vector& z) const {
        if (z.size() != dim()) return false;
        if (is_torus()) return true;
        const auto& c = state_->geom.chart;
        for (int i = 0; i < dim(); ++i)
            if (std::abs(z(i) - c.center(i)) > c.trusted_radius() + 1e-14) return false;
        return true;
    }

    void require_trusted(const Vector& z) const {
        if (!in_trusted_region(z)) throw OutOfTrustedRegion("point outside the trusted region of the chart");
    }

    /// Grid node index of z if it lies on the torus grid.
    std::optional<std::size_t> node_of(const Vector& z) const {
        if (!is_torus()) return std::nullopt;
        const int N = state_->geom.grid.N;
        std::size_t idx = 0;
        for (int i = 0; i < dim(); ++i)
            for (double x : {z(i).real(), z(i).imag()}) {
                const double s = x * N;
                const double r = std::round(s);
                if (std::abs(s - r) > 1e-9) return std::nullopt;
                idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>((static_cast<long>(r) % N + N) % N);
            }
        return idx;
    }

    Matrix metric_at(const Vector& z) const {
        require_trusted(z);
        if (is_torus()) {
            if (auto p = node_of(z)) return metric().at(*p);
            const int n = dim();
            std::vector<std::vector<Wirtinger>> ops;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) ops.push_back({{i, false}, {j, true}});
            const auto vals = spectral().evaluate(potential_coeffs(), real_coords(z), ops);
            Matrix g(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g(i, j) = vals[static_cast<std::size_t>(i * n + j)] + (i == j ? 1.0 : 0.0);
            return 0.5 * (g + g.adjoint());
        }
        const int n = dim();
        const Jet j = detail::chart_jet(state_->chart_psi, n, z);
        Matrix g(n, n);
        for (int i = 0; i < n; ++i)
            for (int jj = 0; jj < n; ++jj) g(i, jj) = j.derivative(detail::wirtinger_index(n, {i}, {jj}));
        return g;
    }

    LocalMetric local(const Vector& z) const {
        require_trusted(z);
        const int n = dim();
        if (!is_torus()) return detail::local_from_jet(detail::chart_jet(state_->chart_psi, n, z), n);
        if (auto p = node_of(z)) return local_at_node(*p);
        std::vector<std::vector<Wirtinger>> ops;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) ops.push_back({{i, false}, {j, true}});
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) ops.push_back({{k, false}, {i, false}, {j, true}});
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) ops.push_back({{k, false}, {i, false}, {j, true}, {l, true}});
        const auto v = spectral().evaluate(potential_coeffs(), real_coords(z), ops);
        return assemble_local(n, [&](std::size_t q) { return v[q]; });
    }

    /// Local data at a torus grid node, from cached derivative fields.
    LocalMetric local_at_node(std::size_t p) const {
        const auto& d = derivative_fields();
        const int n = dim();
        return assemble_local(n, [&](std::size_t q) { return d[q][p]; });
    }

    /// Deterministic quasi-random sample of the trusted region (charts) or of
    /// grid nodes (torus, evenly strided).
    std::vector<Vector> trusted_samples(int count) const {
        std::vector<Vector> out;
        const int n = dim();
        if (is_torus()) {
            const std::size_t total = state_->geom.grid.size();
            const std::size_t c = std::min<std::size_t>(total, static_cast<std::size_t>(std::max(count, 1)));
            for (std::size_t q = 0; q < c; ++q) out.push_back(state_->geom.grid.point(q * total / c));
            return out;
        }
        const auto& dom = state_->geom.chart;
        // Halton sequence in 2n dimensions; radius via sqrt for uniform area.
        static constexpr int primes[6] = {2, 3, 5, 7, 11, 13};
        auto halton = [](int index, int base) {
            double f = 1.0, r = 0.0;
            while (index > 0) {
                f /= base;
                r += f * (index % base);
                index /= base;
            }
            return r;
        };
        for (int q = 0; q < count; ++q) {
            Vector z(n);
            for (int i = 0; i < n; ++i) {
                const double r = dom.trusted_radius() * std::sqrt(halton(q + 1, primes[2 * i]));
                const double th = 2.0 * std::numbers::pi * halton(q + 1, primes[2 * i + 1]);
                z(i) = dom.center(i) + std::polar(r, th);
            }
            out.push_back(z);
        }
        return out;
    }

    std::vector<double> real_coords(const Vector& z) const {
        std::vector<double> x;
        for (int i = 0; i < dim(); ++i) {
            x.push_back(z(i).real());
            x.push_back(z(i).imag());
        }
        return x;
    }

private:
    struct State {
        Geometry geom;
        std::shared_ptr<const TorusSpectral> spectral;
        ScalarField psi;
        std::vector<cd> coeffs;
        MatrixField metric;
        ChartPotential chart_psi;
        mutable std::once_flag derivs_once;
        mutable std::vector<std::vector<cd>> derivs;  // same ordering as local()
    };

    const State& torus_state() const {
        if (!is_torus()) throw InvalidArgument("torus accessor used on a chart field");
        return *state_;
    }

    template <class Get>
    static LocalMetric assemble_local(int n, Get get) {
        LocalMetric lm;
        lm.g = Matrix(n, n);
        lm.dg.assign(static_cast<std::size_t>(n), Matrix(n, n));
        lm.ddbar_g.assign(static_cast<std::size_t>(n * n), Matrix(n, n));
        std::size_t q = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) lm.g(i, j) = get(q++) + (i == j ? 1.0 : 0.0);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) lm.dg[static_cast<std::size_t>(k)](i, j) = get(q++);
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) lm.ddbar_g[static_cast<std::size_t>(k * n + l)](i, j) = get(q++);
        lm.g = 0.5 * (lm.g + lm.g.adjoint());
        return lm;
    }

    const std::vector<std::vector<cd>>& derivative_fields() const {
        const State& s = torus_state();
        std::call_once(s.derivs_once, [&] {
            const int n = dim();
            const auto& sp = *s.spectral;
            auto push = [&](std::vector<Wirtinger> ops) { s.derivs.push_back(sp.apply(s.coeffs, ops)); };
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) push({{i, false}, {j, true}});
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) push({{k, false}, {i, false}, {j, true}});
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) push({{k, false}, {i, false}, {j, true}, {l, true}});
        });
        return s.derivs;
    }

    void check_positive() const {
        const auto& m = state_->metric;
        for (std::size_t p = 0; p < m.points; ++p) {
            const RealVector ev = hermitian_eigenvalues(m.at(p));
            if (!(ev(0) > kFieldDegeneracy * ev.cwiseAbs().maxCoeff())) throw PositivityLoss(p, ev(0), "metric_from_potential");
        }
    }

    std::shared_ptr<State> state_;
};

/// omega_flat + dd^c psi on a torus. Throws PositivityLoss if the result is not
/// positive at some node.
inline MetricField metric_from_potential(const Geometry& geom, ScalarField psi) {
    return MetricField(geom, std::move(psi));
}

/// Closed-form chart metric g_{ij̄} = d_i d_jbar psi.
inline MetricField metric_from_potential(const Geometry& geom, ChartPotential psi) {
    return MetricField(geom, std::move(psi));
}

/// Sample a function of the real coordinates on every node of a torus grid.
inline ScalarField sample_on_grid(const TorusGrid& grid, const std::function<double(std::span<const double>)>& f) {
    ScalarField out(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto x = grid.coordinates(p);
        out[p] = f(x);
    }
    return out;
}

}  // namespace kahler
