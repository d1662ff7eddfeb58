#pragma once

// Fourier machinery on the flat torus C^n / (Z + iZ)^n sampled on a uniform
// grid with N points per real direction. Real coordinates are ordered
// (x1, y1, x2, y2, ...) with z_i = x_i + sqrt(-1) y_i, x1 varying slowest.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "kahler/error.hpp"
#include "kahler/hermitian.hpp"

namespace kahler {

using ScalarField = std::vector<double>;

/// Sum with a fixed pairwise reduction order.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 16) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.subspan(0, half)) + pairwise_sum(x.subspan(half));
}

inline double grid_mean(std::span<const double> x) { return pairwise_sum(x) / static_cast<double>(x.size()); }

struct TorusGrid {
    int n = 1;   // complex dimension
    int N = 16;  // points per real direction

    int real_dims() const { return 2 * n; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < real_dims(); ++d) s *= static_cast<std::size_t>(N);
        return s;
    }
    bool operator==(const TorusGrid&) const = default;

    /// Real coordinates of grid node `p`.
    std::vector<double> coordinates(std::size_t p) const {
        std::vector<double> x(static_cast<std::size_t>(real_dims()));
        for (int d = real_dims() - 1; d >= 0; --d) {
            x[static_cast<std::size_t>(d)] = static_cast<double>(p % static_cast<std::size_t>(N)) / N;
            p /= static_cast<std::size_t>(N);
        }
        return x;
    }
    /// Complex point z of grid node `p`.
    Vector point(std::size_t p) const {
        const auto x = coordinates(p);
        Vector z(n);
        for (int i = 0; i < n; ++i) z(i) = cd(x[2 * i], x[2 * i + 1]);
        return z;
    }
};

/// Hermitian n x n matrix at every grid node, point-major.
struct MatrixField {
    int n = 1;
    std::size_t points = 0;
    std::vector<cd> data;

    MatrixField() = default;
    MatrixField(int dim, std::size_t count) : n(dim), points(count), data(count * dim * dim) {}

    cd& operator()(std::size_t p, int i, int j) { return data[(p * n + i) * n + j]; }
    cd operator()(std::size_t p, int i, int j) const { return data[(p * n + i) * n + j]; }

    Matrix at(std::size_t p) const {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = (*this)(p, i, j);
        return m;
    }
    void set(std::size_t p, const Matrix& m) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (*this)(p, i, j) = m(i, j);
    }
};

/// One Wirtinger derivative: d/dz_i (barred = false) or d/dz-bar_i.
struct Wirtinger {
    int index = 0;
    bool barred = false;
};

class TorusSpectral {
public:
    explicit TorusSpectral(TorusGrid grid) : grid_(grid), size_(grid.size()) {
        if (grid.n < 1 || grid.n > kMaxDim) throw InvalidArgument("torus: n must be 1..3");
        if (grid.N < 4 || grid.N % 2 != 0) throw InvalidArgument("torus: N must be even and >= 4");
        const int dims = grid.real_dims();
        wave_.assign(static_cast<std::size_t>(dims), std::vector<double>(size_));
        nyquist_.assign(size_, 0);
        for (std::size_t p = 0; p < size_; ++p) {
            std::size_t rest = p;
            for (int d = dims - 1; d >= 0; --d) {
                const int idx = static_cast<int>(rest % static_cast<std::size_t>(grid.N));
                rest /= static_cast<std::size_t>(grid.N);
                const int k = idx <= grid.N / 2 ? idx : idx - grid.N;
                wave_[static_cast<std::size_t>(d)][p] = k;
                if (idx == grid.N / 2) nyquist_[p] = 1;
            }
        }
        std::vector<int> shape(static_cast<std::size_t>(dims), grid.N);
        std::vector<cd> scratch(size_);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        std::lock_guard lock(planner_mutex());
        forward_ = fftw_plan_dft(dims, shape.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        backward_ = fftw_plan_dft(dims, shape.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    ~TorusSpectral() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    TorusSpectral(const TorusSpectral&) = delete;
    TorusSpectral& operator=(const TorusSpectral&) = delete;

    const TorusGrid& grid() const { return grid_; }
    std::size_t size() const { return size_; }

    /// Fourier coefficients c_k with f(x) = sum_k c_k exp(2 pi i k.x).
    std::vector<cd> forward(std::span<const double> f) const {
        check(f.size());
        std::vector<cd> c(f.begin(), f.end());
        fftw_execute_dft(forward_, as_fftw(c), as_fftw(c));
        const double inv = 1.0 / static_cast<double>(size_);
        for (cd& v : c) v *= inv;
        return c;
    }
    std::vector<cd> forward(std::span<const cd> f) const {
        check(f.size());
        std::vector<cd> c(f.begin(), f.end());
        fftw_execute_dft(forward_, as_fftw(c), as_fftw(c));
        const double inv = 1.0 / static_cast<double>(size_);
        for (cd& v : c) v *= inv;
        return c;
    }
    /// Synthesis from coefficients, in place.
    void backward(std::vector<cd>& c) const {
        check(c.size());
        fftw_execute_dft(backward_, as_fftw(c), as_fftw(c));
    }

    double wavenumber(int real_dim, std::size_t mode) const { return wave_[static_cast<std::size_t>(real_dim)][mode]; }
    bool is_nyquist(std::size_t mode) const { return nyquist_[mode] != 0; }

    /// Fourier multiplier of a product of Wirtinger derivatives. Modes touching
    /// the Nyquist frequency are dropped by every derivative.
    cd symbol(std::size_t mode, std::span<const Wirtinger> ops) const {
        if (ops.empty()) return 1.0;
        if (is_nyquist(mode)) return 0.0;
        constexpr double pi = std::numbers::pi;
        cd s = 1.0;
        for (const auto& op : ops) {
            const double kx = wave_[static_cast<std::size_t>(2 * op.index)][mode];
            const double ky = wave_[static_cast<std::size_t>(2 * op.index + 1)][mode];
            // d/dz = (d/dx - i d/dy)/2, d/dz-bar = (d/dx + i d/dy)/2, d/dx -> 2 pi i k.
            s *= op.barred ? cd(-pi * ky, pi * kx) : cd(pi * ky, pi * kx);
        }
        return s;
    }

    /// Symbol of the flat Laplacian sum_i d_i d_ibar.
    double laplacian_symbol(std::size_t mode) const {
        if (is_nyquist(mode)) return 0.0;
        double k2 = 0.0;
        for (int d = 0; d < grid_.real_dims(); ++d) k2 += wave_[static_cast<std::size_t>(d)][mode] * wave_[static_cast<std::size_t>(d)][mode];
        return -std::numbers::pi * std::numbers::pi * k2;
    }

    /// Apply a derivative to coefficients and synthesize on the grid.
    std::vector<cd> apply(const std::vector<cd>& coeffs, std::span<const Wirtinger> ops) const {
        std::vector<cd> out(size_);
        for (std::size_t m = 0; m < size_; ++m) out[m] = coeffs[m] * symbol(m, ops);
        backward(out);
        return out;
    }

    /// Complex Hessian H_{ij} = d_i d_jbar f of a real field.
    MatrixField ddbar(std::span<const double> f) const { return ddbar_coeffs(forward(f)); }

    MatrixField ddbar_coeffs(const std::vector<cd>& coeffs) const {
        const int n = grid_.n;
        MatrixField h(n, size_);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const Wirtinger ops[2] = {{i, false}, {j, true}};
                const auto v = apply(coeffs, ops);
                for (std::size_t p = 0; p < size_; ++p) {
                    if (i == j) {
                        h(p, i, i) = v[p].real();
                    } else {
                        h(p, i, j) = v[p];
                        h(p, j, i) = std::conj(v[p]);
                    }
                }
            }
        return h;
    }

    /// Evaluate the trigonometric interpolant (and derivatives) at arbitrary
    /// real coordinates x. Each entry of `ops_list` yields one output value.
    std::vector<cd> evaluate(const std::vector<cd>& coeffs, std::span<const double> x,
                             const std::vector<std::vector<Wirtinger>>& ops_list) const {
        const int dims = grid_.real_dims();
        const int N = grid_.N;
        constexpr double two_pi = 2.0 * std::numbers::pi;
        // Per-dimension phase tables.
        std::vector<std::vector<cd>> phase(static_cast<std::size_t>(dims), std::vector<cd>(static_cast<std::size_t>(N)));
        for (int d = 0; d < dims; ++d)
            for (int idx = 0; idx < N; ++idx) {
                const int k = idx <= N / 2 ? idx : idx - N;
                phase[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx)] =
                    idx == N / 2 ? cd(std::cos(std::numbers::pi * N * x[static_cast<std::size_t>(d)]), 0.0)
                                 : std::polar(1.0, two_pi * k * x[static_cast<std::size_t>(d)]);
            }
        std::vector<cd> out(ops_list.size(), cd{});
        for (std::size_t m = 0; m < size_; ++m) {
            if (coeffs[m] == 0.0) continue;
            std::size_t rest = m;
            cd ph = 1.0;
            for (int d = dims - 1; d >= 0; --d) {
                ph *= phase[static_cast<std::size_t>(d)][rest % static_cast<std::size_t>(N)];
                rest /= static_cast<std::size_t>(N);
            }
            const cd base = coeffs[m] * ph;
            for (std::size_t q = 0; q < ops_list.size(); ++q) out[q] += base * symbol(m, ops_list[q]);
        }
        return out;
    }

    /// Zero every mode touching the Nyquist frequency. Derivatives ignore those modes on
    /// this grid, so they must not reappear as ordinary modes after padding.
    void drop_nyquist(std::vector<cd>& coeffs) const {
        check(coeffs.size());
        for (std::size_t m = 0; m < size_; ++m)
            if (is_nyquist(m)) coeffs[m] = 0.0;
    }

    /// Coefficients of the same trigonometric interpolant on a grid with
    /// `fine_N` >= N points per direction (zero padding; Nyquist split evenly).
    std::vector<cd> pad_coefficients(const std::vector<cd>& coeffs, int fine_N) const {
        const int dims = grid_.real_dims();
        const int N = grid_.N;
        if (fine_N < N || fine_N % 2 != 0) throw InvalidArgument("pad_coefficients: fine grid must be even and >= N");
        TorusGrid fine{grid_.n, fine_N};
        std::vector<cd> out(fine.size(), cd{});
        std::vector<int> k(static_cast<std::size_t>(dims));
        for (std::size_t m = 0; m < size_; ++m) {
            if (coeffs[m] == 0.0) continue;
            int nyq = 0;
            for (int d = 0; d < dims; ++d) {
                k[static_cast<std::size_t>(d)] = static_cast<int>(wave_[static_cast<std::size_t>(d)][m]);
                if (k[static_cast<std::size_t>(d)] == N / 2) ++nyq;
            }
            const int copies = 1 << nyq;
            const double weight = 1.0 / copies;
            for (int mask = 0; mask < copies; ++mask) {
                std::size_t idx = 0;
                int bit = 0;
                for (int d = 0; d < dims; ++d) {
                    int kd = k[static_cast<std::size_t>(d)];
                    if (kd == N / 2 && fine_N != N) {
                        if ((mask >> bit++) & 1) kd = -kd;
                    }
                    idx = idx * static_cast<std::size_t>(fine_N) + static_cast<std::size_t>((kd + fine_N) % fine_N);
                }
                out[idx] += (fine_N == N ? 1.0 : weight) * coeffs[m];
                if (fine_N == N) break;
            }
        }
        return out;
    }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }
    static fftw_complex* as_fftw(std::vector<cd>& v) { return reinterpret_cast<fftw_complex*>(v.data()); }
    void check(std::size_t s) const {
        if (s != size_) throw DimensionMismatch("torus field size does not match grid");
    }

    TorusGrid grid_;
    std::size_t size_;
    std::vector<std::vector<double>> wave_;
    std::vector<unsigned char> nyquist_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Shared spectral context per grid.
inline std::shared_ptr<const TorusSpectral> torus_spectral(TorusGrid grid) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::weak_ptr<const TorusSpectral>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{grid.n, grid.N}];
    if (auto sp = slot.lock()) return sp;
    auto sp = std::make_shared<const TorusSpectral>(grid);
    slot = sp;
    return sp;
}

/// Real part of a synthesized field.
inline ScalarField real_part(const std::vector<cd>& v) {
    ScalarField out(v.size());
    for (std::size_t p = 0; p < v.size(); ++p) out[p] = v[p].real();
    return out;
}

/// Resample a real field onto a finer grid through its trigonometric interpolant.
inline ScalarField interpolate_field(const TorusSpectral& coarse, std::span<const double> f, int fine_N) {
    const auto fine = torus_spectral({coarse.grid().n, fine_N});
    auto c = coarse.pad_coefficients(coarse.forward(f), fine_N);
    fine->backward(c);
    return real_part(c);
}

}  // namespace kahler
