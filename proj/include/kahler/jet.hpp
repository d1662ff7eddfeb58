#pragma once

// Truncated multivariate Taylor expansions ("jets") with complex coefficients.
// Chart potentials are written as holomorphic expressions in independent
// variables (z, w) with w standing for z-bar; jets of those expressions give
// exact Wirtinger derivatives of the potential up to total order 4.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "kahler/error.hpp"

namespace kahler {

inline constexpr int kJetOrder = 4;
inline constexpr int kJetMaxVars = 6;
inline constexpr int kJetMaxTerms = 210;  // monomials of degree <= 4 in 6 variables

using MultiIndex = std::array<std::uint8_t, kJetMaxVars>;

class JetLayout {
public:
    explicit JetLayout(int vars) : vars_(vars) {
        MultiIndex m{};
        for (int deg = 0; deg <= kJetOrder; ++deg) enumerate(m, 0, deg);
        for (std::size_t q = 0; q < monos_.size(); ++q) lookup_[monos_[q]] = static_cast<int>(q);
        for (std::size_t a = 0; a < monos_.size(); ++a)
            for (std::size_t b = 0; b < monos_.size(); ++b) {
                if (degree_[a] + degree_[b] > kJetOrder) continue;
                MultiIndex s{};
                for (int v = 0; v < vars_; ++v) s[v] = static_cast<std::uint8_t>(monos_[a][v] + monos_[b][v]);
                products_.push_back({static_cast<std::int16_t>(a), static_cast<std::int16_t>(b),
                                     static_cast<std::int16_t>(lookup_.at(s))});
            }
    }

    int vars() const { return vars_; }
    int size() const { return static_cast<int>(monos_.size()); }
    int degree(int q) const { return degree_[q]; }
    const MultiIndex& monomial(int q) const { return monos_[q]; }
    int index(const MultiIndex& m) const {
        const auto it = lookup_.find(m);
        return it == lookup_.end() ? -1 : it->second;
    }

    struct Product {
        std::int16_t a, b, c;
    };
    const std::vector<Product>& products() const { return products_; }

private:
    void enumerate(MultiIndex& m, int v, int remaining) {
        if (v == vars_ - 1) {
            m[v] = static_cast<std::uint8_t>(remaining);
            monos_.push_back(m);
            degree_.push_back(total(m));
            m[v] = 0;
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            m[v] = static_cast<std::uint8_t>(e);
            enumerate(m, v + 1, remaining - e);
        }
        m[v] = 0;
    }
    int total(const MultiIndex& m) const {
        int t = 0;
        for (int v = 0; v < vars_; ++v) t += m[v];
        return t;
    }

    int vars_;
    std::vector<MultiIndex> monos_;
    std::vector<int> degree_;
    std::map<MultiIndex, int> lookup_;
    std::vector<Product> products_;
};

inline const JetLayout& jet_layout(int vars) {
    if (vars < 1 || vars > kJetMaxVars) throw InvalidArgument("jet_layout: 1..6 variables supported");
    static std::array<std::unique_ptr<JetLayout>, kJetMaxVars + 1> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    if (!cache[vars]) cache[vars] = std::make_unique<JetLayout>(vars);
    return *cache[vars];
}

class Jet {
public:
    using cd = std::complex<double>;

    explicit Jet(const JetLayout& layout, cd constant = {}) : layout_(&layout) {
        c_.fill(cd{});
        c_[0] = constant;
    }

    /// The coordinate function x_v expanded about `value`.
    static Jet variable(const JetLayout& layout, int v, cd value) {
        Jet j(layout, value);
        MultiIndex m{};
        m[v] = 1;
        j.c_[layout.index(m)] = 1.0;
        return j;
    }

    const JetLayout& layout() const { return *layout_; }
    int order() const { return order_; }
    cd value() const { return c_[0]; }
    cd coefficient(int q) const { return c_[q]; }

    /// Partial derivative d^alpha at the expansion point (alpha! times the coefficient).
    cd derivative(const MultiIndex& alpha) const {
        int deg = 0;
        double fact = 1.0;
        for (int v = 0; v < layout_->vars(); ++v) {
            deg += alpha[v];
            for (int e = 2; e <= alpha[v]; ++e) fact *= e;
        }
        if (deg > order_) throw InvalidArgument("Jet::derivative: order exceeds truncation");
        return fact * c_[layout_->index(alpha)];
    }

    /// Jet of the partial derivative with respect to variable v (one order lower).
    Jet differentiate(int v) const {
        Jet out(*layout_);
        out.order_ = order_ - 1;
        if (out.order_ < 0) throw InvalidArgument("Jet::differentiate: order exhausted");
        for (int q = 0; q < layout_->size(); ++q) {
            if (layout_->degree(q) > out.order_) continue;
            MultiIndex m = layout_->monomial(q);
            m[v] = static_cast<std::uint8_t>(m[v] + 1);
            out.c_[q] = static_cast<double>(m[v]) * c_[layout_->index(m)];
        }
        return out;
    }

    Jet& operator+=(const Jet& o) {
        order_ = std::min(order_, o.order_);
        for (int q = 0; q < layout_->size(); ++q) c_[q] += o.c_[q];
        truncate();
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        order_ = std::min(order_, o.order_);
        for (int q = 0; q < layout_->size(); ++q) c_[q] -= o.c_[q];
        truncate();
        return *this;
    }
    Jet& operator+=(cd s) {
        c_[0] += s;
        return *this;
    }
    Jet& operator*=(cd s) {
        for (int q = 0; q < layout_->size(); ++q) c_[q] *= s;
        return *this;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet out(*a.layout_);
        out.order_ = std::min(a.order_, b.order_);
        for (const auto& p : a.layout_->products())
            if (a.layout_->degree(p.c) <= out.order_) out.c_[p.c] += a.c_[p.a] * b.c_[p.b];
        return out;
    }

    /// f(a) from the Taylor coefficients f(c), f'(c), ..., f''''(c) at c = a.value().
    Jet compose(const std::array<cd, kJetOrder + 1>& derivs) const {
        Jet h = *this;
        h.c_[0] = 0.0;
        Jet out(*layout_, derivs[0]);
        out.order_ = order_;
        Jet power = h;
        double fact = 1.0;
        for (int m = 1; m <= order_; ++m) {
            fact *= m;
            Jet term = power;
            term *= derivs[m] / fact;
            out += term;
            if (m < order_) power = power * h;
        }
        return out;
    }

private:
    void truncate() {
        for (int q = 0; q < layout_->size(); ++q)
            if (layout_->degree(q) > order_) c_[q] = 0.0;
    }

    const JetLayout* layout_;
    int order_ = kJetOrder;
    std::array<cd, kJetMaxTerms> c_;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator+(Jet a, std::complex<double> s) { return a += s; }
inline Jet operator+(std::complex<double> s, Jet a) { return a += s; }
inline Jet operator-(Jet a, std::complex<double> s) { return a += -s; }
inline Jet operator-(std::complex<double> s, Jet a) {
    a *= -1.0;
    return a += s;
}
inline Jet operator*(Jet a, std::complex<double> s) { return a *= s; }
inline Jet operator*(std::complex<double> s, Jet a) { return a *= s; }
inline Jet operator-(Jet a) { return a *= -1.0; }

inline Jet log(const Jet& a) {
    const auto c = a.value();
    if (c == 0.0) throw InvalidArgument("log of a jet with zero constant term");
    return a.compose({std::log(c), 1.0 / c, -1.0 / (c * c), 2.0 / (c * c * c), -6.0 / (c * c * c * c)});
}

inline Jet exp(const Jet& a) {
    const auto e = std::exp(a.value());
    return a.compose({e, e, e, e, e});
}

/// Principal branch of a^p.
inline Jet pow(const Jet& a, std::complex<double> p) {
    const auto c = a.value();
    if (c == 0.0) throw InvalidArgument("pow of a jet with zero constant term");
    std::array<std::complex<double>, kJetOrder + 1> d{};
    std::complex<double> coef = 1.0;
    for (int m = 0; m <= kJetOrder; ++m) {
        d[m] = coef * std::pow(c, p - static_cast<double>(m));
        coef *= p - static_cast<double>(m);
    }
    return a.compose(d);
}

inline Jet reciprocal(const Jet& a) { return pow(a, -1.0); }
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

}  // namespace kahler
