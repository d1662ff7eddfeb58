#pragma once

// Pointwise linear algebra for Hermitian metrics on C^n, n <= 3.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "kahler/error.hpp"

namespace kahler {

using cd = std::complex<double>;

inline constexpr int kMaxDim = 3;

using Matrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using RealVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

/// Relative threshold used by HermitianMetric: smallest eigenvalue must exceed
/// this times the largest.
inline constexpr double kMetricDegeneracy = 1e-12;

inline int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Elementary symmetric polynomials e_0..e_n of `x`.
inline std::vector<double> elementary_symmetric(std::span<const double> x) {
    std::vector<double> e(x.size() + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = i + 1; k >= 1; --k) e[k] += e[k - 1] * x[i];
    return e;
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline RealVector hermitian_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Positive-definiteness test with a scale-invariant threshold.
inline bool is_positive_definite(const Matrix& m, double relative_threshold) {
    const RealVector ev = hermitian_eigenvalues(m);
    const double largest = ev.cwiseAbs().maxCoeff();
    return ev(0) > relative_threshold * largest && largest > 0.0;
}

/// Positive-definite Hermitian n x n matrix g_{ij̄}. Stored exactly Hermitian.
class HermitianMetric {
public:
    explicit HermitianMetric(const Matrix& entries) : g_(entries) {
        const auto n = entries.rows();
        if (n < 1 || n > kMaxDim || entries.cols() != n)
            throw DimensionMismatch("HermitianMetric: dimension must be 1..3 and square");
        const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
        if ((entries - entries.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw InvalidArgument("HermitianMetric: matrix is not Hermitian");
        g_ = 0.5 * (entries + entries.adjoint());
        for (int i = 0; i < n; ++i) g_(i, i) = cd(g_(i, i).real(), 0.0);
        const RealVector ev = hermitian_eigenvalues(g_);
        if (!(ev(0) > kMetricDegeneracy * ev.cwiseAbs().maxCoeff()))
            throw NotPositiveDefinite("HermitianMetric: smallest eigenvalue " +
                                      std::to_string(ev(0)) + " not positive");
    }

    static HermitianMetric identity(int n) { return HermitianMetric(Matrix::Identity(n, n)); }

    static HermitianMetric diagonal(std::span<const double> values) {
        Matrix m = Matrix::Zero(static_cast<int>(values.size()), static_cast<int>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return HermitianMetric(m);
    }

    int dim() const { return static_cast<int>(g_.rows()); }
    const Matrix& matrix() const { return g_; }
    cd operator()(int i, int j) const { return g_(i, j); }
    Matrix inverse() const { return g_.llt().solve(Matrix::Identity(dim(), dim())); }

    /// ||eta||^2 = g_{ij̄} eta^i conj(eta^j).
    double norm_squared(const Vector& eta) const { return (eta.adjoint() * g_.transpose() * eta)(0, 0).real(); }

private:
    Matrix g_;
};

/// Nonzero tangent direction.
class Direction {
public:
    explicit Direction(Vector eta) : eta_(std::move(eta)) {
        if (eta_.size() < 1 || eta_.size() > kMaxDim)
            throw DimensionMismatch("Direction: dimension must be 1..3");
        if (!(eta_.norm() > 0.0)) throw InvalidArgument("Direction: zero vector");
    }
    int dim() const { return static_cast<int>(eta_.size()); }
    const Vector& vector() const { return eta_; }

private:
    Vector eta_;
};

/// sigma_0..sigma_n of one metric relative to another.
class SigmaVector {
public:
    explicit SigmaVector(std::vector<double> sigma) : sigma_(std::move(sigma)) {
        if (sigma_.size() < 2 || sigma_.size() > kMaxDim + 1)
            throw DimensionMismatch("SigmaVector: need 1 <= n <= 3");
    }
    int dim() const { return static_cast<int>(sigma_.size()) - 1; }
    double operator[](int k) const { return sigma_.at(static_cast<std::size_t>(k)); }
    std::span<const double> values() const { return sigma_; }

private:
    std::vector<double> sigma_;
};

namespace detail {
inline void require_same_dim(const HermitianMetric& a, const HermitianMetric& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("metric pair has mismatched dimensions");
}
}  // namespace detail

/// Eigenvalues of gA^{-1} gB, ascending. Uses Cholesky of gA followed by a
/// Hermitian eigensolve of L^{-1} gB L^{-*}.
inline std::vector<double> relative_eigenvalues(const HermitianMetric& gA, const HermitianMetric& gB) {
    detail::require_same_dim(gA, gB);
    Eigen::LLT<Matrix> llt(gA.matrix());
    const Matrix linv = llt.matrixL().solve(Matrix::Identity(gA.dim(), gA.dim()));
    const Matrix c = linv * gB.matrix() * linv.adjoint();
    const RealVector ev = hermitian_eigenvalues(0.5 * (c + c.adjoint()));
    std::vector<double> out(ev.data(), ev.data() + ev.size());
    for (double v : out)
        if (!(v > 0.0)) throw NotPositiveDefinite("relative_eigenvalues: non-positive eigenvalue");
    return out;
}

/// sigma_k = e_k(relative eigenvalues of gB with respect to gA).
inline SigmaVector sigma_ratios(const HermitianMetric& gA, const HermitianMetric& gB) {
    const auto lambda = relative_eigenvalues(gA, gB);
    return SigmaVector(elementary_symmetric(lambda));
}

/// Signed margin of the Newton-MacLaurin step
///   (sigma_n / sigma_0)^{1/n} >= (sigma_n / (sigma_k / C(n,k)))^{1/(n-k)},
/// returned as LHS - RHS. Zero exactly when all eigenvalues coincide.
inline double newton_maclaurin_margin(const SigmaVector& sigma, int k) {
    const int n = sigma.dim();
    if (k < 1 || k > n - 1) throw InvalidArgument("newton_maclaurin_margin: k must lie in [1, n-1]");
    const double lhs = std::pow(sigma[n] / sigma[0], 1.0 / n);
    const double rhs = std::pow(sigma[n] / (sigma[k] / binomial(n, k)), 1.0 / (n - k));
    return lhs - rhs;
}

/// Trace of g with respect to gPrime: g'^{ij̄} g_{ij̄}.
inline double trace_S(const HermitianMetric& g, const HermitianMetric& gPrime) {
    detail::require_same_dim(g, gPrime);
    return gPrime.matrix().llt().solve(g.matrix()).trace().real();
}

/// Linear change of coordinates z = T w that brings g_{ij̄} to the identity and
/// g'_{ij̄} to diag(d), d ascending. Components transform as
/// g~_{ab̄} = T_{ia} g_{ij̄} conj(T_{jb}).
struct NormalFrame {
    Matrix transform;
    RealVector diagonal;
};

/// Transform a (1,1)-tensor a_{ij̄} into the frame: T^T a conj(T).
inline Matrix to_frame(const Matrix& a, const Matrix& t) { return t.transpose() * a * t.conjugate(); }

inline NormalFrame normal_frame(const Matrix& g, const Matrix& gPrime) {
    const int n = static_cast<int>(g.rows());
    // With A = g^T, T^* A T = I is the conjugate of T^T g conj(T) = I.
    const Matrix a = g.transpose();
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("normal_frame: g is not positive-definite");
    const Matrix linv = llt.matrixL().solve(Matrix::Identity(n, n));
    Matrix c = linv * gPrime.transpose() * linv.adjoint();
    c = 0.5 * (c + c.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    return {linv.adjoint() * es.eigenvectors(), es.eigenvalues()};
}

}  // namespace kahler
