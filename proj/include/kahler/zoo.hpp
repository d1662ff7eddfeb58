#pragma once

// Example geometries used across the workbench, each with a registry of known
// facts. A fact stores how to re-derive its value (the oracle) and how to
// measure it on the constructed field; nothing is a bare hard-coded number.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "kahler/curvature.hpp"
#include "kahler/geometry.hpp"

namespace kahler {

struct ExampleParams {
    int n = 1;
    int N = 32;                            // torus resolution
    double amplitude = 0.02;               // perturbed torus potential amplitude
    std::vector<std::vector<int>> modes;   // perturbed torus wavevectors (2n ints each)
    double scale = 1.0;                    // Poincaré scale s (g = s / (1 - |z|^2)^2)
    int degree = 5;                        // Fermat degree d
    double line_parameter = 1.0;           // base point t on the Fermat line
    double bump_amplitude = 0.02;          // bump-perturbed polydisk
    double bump_radius = 0.5;
};

struct KnownFact {
    std::string name;
    std::string provenance;  // closed-form | jet-oracle | sweep
    std::string recipe;
    std::function<double()> oracle;
    std::function<double(const MetricField&)> measure;
    double tolerance = 1e-10;
};

struct ExampleSpec {
    std::string name;
    SubstrateKind substrate = SubstrateKind::PeriodicTorus;
    std::string potential;
    std::vector<KnownFact> facts;
    std::vector<std::string> warnings;
    Vector marked_point;      // Fermat: point on the contained line
    Vector marked_direction;  // Fermat: tangent of the line
};

struct Example {
    Geometry geometry;
    MetricField field;
    ExampleSpec spec;
};

struct FactCheck {
    std::string name;
    std::string provenance;
    double oracle = 0.0;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline std::vector<FactCheck> verify_facts(const Example& ex) {
    std::vector<FactCheck> out;
    for (const auto& f : ex.spec.facts) {
        const double o = f.oracle();
        const double m = f.measure(ex.field);
        out.push_back({f.name, f.provenance, o, m, f.tolerance, std::abs(o - m) <= f.tolerance});
    }
    return out;
}

inline std::vector<std::string> example_names() {
    return {"flat-torus", "perturbed-torus", "poincare-disk", "poincare-polydisk", "fubini-study", "fermat-chart",
            "bumped-polydisk"};
}

namespace zoo {

inline ChartPotential poincare_polydisk_potential(int n, double s) {
    return [n, s](std::span<const Jet> z, std::span<const Jet> w) {
        Jet acc(z[0].layout());
        for (int i = 0; i < n; ++i) acc += -s * log(1.0 - z[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)]);
        return acc;
    };
}

inline ChartPotential fubini_study_potential(int n) {
    return [n](std::span<const Jet> z, std::span<const Jet> w) {
        Jet acc(z[0].layout(), 1.0);
        for (int i = 0; i < n; ++i) acc += z[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        return log(acc);
    };
}

/// Compactly supported bump a * exp(-1 / (1 - |z - c|^2 / rho^2)).
inline Jet bump(std::span<const Jet> z, std::span<const Jet> w, const Vector& c, double rho, double a) {
    const std::size_t n = z.size();
    Jet r2(z[0].layout());
    for (std::size_t i = 0; i < n; ++i)
        r2 += (z[i] - c(static_cast<int>(i))) * (w[i] - std::conj(c(static_cast<int>(i)))) * (1.0 / (rho * rho));
    if (r2.value().real() >= 1.0) return Jet(z[0].layout());
    return a * exp(-reciprocal(1.0 - r2));
}

inline Vector bump_center(int n) {
    Vector c(n);
    for (int i = 0; i < n; ++i) c(i) = cd(0.1 * (i + 1), -0.05 * (i + 1));
    return c;
}

inline ChartPotential bumped_polydisk_potential(int n, double s, double a, double rho) {
    const auto base = poincare_polydisk_potential(n, s);
    const Vector c = bump_center(n);
    return [base, c, a, rho](std::span<const Jet> z, std::span<const Jet> w) { return base(z, w) + bump(z, w, c, rho, a); };
}

/// Affine Fermat chart 1 + z_1^d + ... + z_{n+1}^d = 0 of F_d in CP^{n+1},
/// parametrized by every coordinate except z_3, which is solved as
/// zeta (1 + sum_{j != 3} z_j^d)^{1/d} with zeta = exp(i pi / d).
inline ChartPotential fermat_potential(int n, int d) {
    const cd zeta = std::polar(1.0, std::numbers::pi / d);
    return [n, d, zeta](std::span<const Jet> z, std::span<const Jet> w) {
        const auto& layout = z[0].layout();
        Jet sz(layout, 1.0), sw(layout, 1.0), quad(layout, 1.0);
        for (int i = 0; i < n; ++i) {
            Jet pz(layout, 1.0), pw(layout, 1.0);
            for (int e = 0; e < d; ++e) {
                pz = pz * z[static_cast<std::size_t>(i)];
                pw = pw * w[static_cast<std::size_t>(i)];
            }
            sz += pz;
            sw += pw;
            quad += z[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        }
        const Jet h = zeta * pow(sz, 1.0 / d);
        const Jet hbar = std::conj(zeta) * pow(sw, 1.0 / d);
        return log(quad + h * hbar);
    };
}

/// Max |H - value| over a handful of samples and directions.
inline double hsc_deviation(const MetricField& f, double value, int points, int directions) {
    double worst = 0.0;
    for (const auto& z : f.trusted_samples(points)) {
        const auto e = hsc_extremes(f, z, {directions, 50});
        worst = std::max({worst, std::abs(e.hmin - value), std::abs(e.hmax - value)});
    }
    return worst;
}

/// Max over samples of |Ric + lambda g|, with Ric from the log-det route.
inline double einstein_deviation(const MetricField& f, double lambda, int points) {
    const FormField ric = ricci_form(f);
    double worst = 0.0;
    for (const auto& z : f.trusted_samples(points))
        worst = std::max(worst, (ric.at(z) + lambda * f.metric_at(z)).cwiseAbs().maxCoeff());
    return worst;
}

inline std::vector<std::vector<int>> default_modes(int n) {
    std::vector<std::vector<int>> modes;
    std::vector<int> k(static_cast<std::size_t>(2 * n), 0);
    k[0] = 1;
    modes.push_back(k);
    if (n >= 2) {
        std::vector<int> a(static_cast<std::size_t>(2 * n), 0), b(static_cast<std::size_t>(2 * n), 0);
        a[3] = 1;          // y2
        b[0] = 1, b[2] = 1;  // x1 + x2
        modes.push_back(a);
        modes.push_back(b);
    }
    return modes;
}

}  // namespace zoo

/// Build one of the registered examples.
inline Example make_example(const std::string& name, ExampleParams p = {}) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (name == "flat-torus" || name == "perturbed-torus") {
        const Geometry geom = Geometry::torus(p.n, p.N);
        ExampleSpec spec;
        spec.name = name;
        spec.substrate = SubstrateKind::PeriodicTorus;
        ScalarField psi(geom.grid.size(), 0.0);
        if (name == "perturbed-torus") {
            if (p.modes.empty()) p.modes = zoo::default_modes(p.n);
            for (const auto& k : p.modes)
                if (static_cast<int>(k.size()) != 2 * p.n) throw InvalidArgument("perturbed-torus: each mode needs 2n integers");
            const auto modes = p.modes;
            const double a = p.amplitude;
            psi = sample_on_grid(geom.grid, [&](std::span<const double> x) {
                double v = 0.0;
                for (const auto& k : modes) {
                    double phase = 0.0;
                    for (std::size_t d = 0; d < k.size(); ++d) phase += k[d] * x[d];
                    v += a * std::cos(two_pi * phase);
                }
                return v;
            });
            spec.potential = "amplitude * sum_m cos(2 pi k_m . x)";
            spec.facts.push_back({"total_volume", "closed-form",
                                  "integral of det(delta + ddbar psi) equals the flat volume 1 (dd^c-exact shift)",
                                  [] { return 1.0; },
                                  [](const MetricField& f) {
                                      ScalarField det(f.metric().points);
                                      for (std::size_t q = 0; q < det.size(); ++q) det[q] = f.metric().at(q).determinant().real();
                                      return grid_mean(det);
                                  },
                                  1e-12});
            spec.facts.push_back({"hsc_sign_change", "sweep",
                                  "Gauss-Bonnet on the torus forces H of both signs, so kappa_0 < 0; recorded as sign(kappa_0)",
                                  [] { return -1.0; },
                                  [](const MetricField& f) {
                                      const auto kf = kappa_floor(f, {{400, 50}, 256});
                                      return kf.kappa0 < 0.0 ? -1.0 : (kf.kappa0 > 0.0 ? 1.0 : 0.0);
                                  },
                                  0.0});
        } else {
            spec.potential = "0";
            spec.facts.push_back({"hsc", "closed-form", "flat metric has R = 0", [] { return 0.0; },
                                  [](const MetricField& f) { return zoo::hsc_deviation(f, 0.0, 8, 200); }, 1e-12});
        }
        MetricField field = metric_from_potential(geom, std::move(psi));
        return {geom, std::move(field), std::move(spec)};
    }
    if (name == "poincare-disk" || name == "poincare-polydisk" || name == "bumped-polydisk") {
        if (!(p.scale > 0.0)) throw InvalidArgument("poincare: scale must be positive");
        const int n = name == "poincare-disk" ? 1 : p.n;
        const double s = p.scale;
        const Geometry geom = Geometry::analytic_chart(n, Vector::Zero(n), 1.0, 0.1);
        ExampleSpec spec;
        spec.name = name;
        spec.substrate = SubstrateKind::AnalyticChart;
        ChartPotential psi;
        if (name == "bumped-polydisk") {
            if (!(p.bump_radius > 0.0)) throw InvalidArgument("bumped-polydisk: bump radius must be positive");
            psi = zoo::bumped_polydisk_potential(n, s, p.bump_amplitude, p.bump_radius);
            spec.potential = "-s sum log(1 - |z_i|^2) + a exp(-1 / (1 - |z - c|^2 / rho^2))";
        } else {
            psi = zoo::poincare_polydisk_potential(n, s);
            spec.potential = "-s sum log(1 - |z_i|^2)";
            // g = s (1 - |z|^2)^{-2}: R = -g ddbar log g = -(2/s) g^2 per factor.
            spec.facts.push_back({"hsc_min", "closed-form", "factor direction: H = -2/s",
                                  [s] { return -2.0 / s; },
                                  [](const MetricField& f) {
                                      double worst = -1e300;
                                      for (const auto& z : f.trusted_samples(6)) worst = std::max(worst, hsc_extremes(f, z, {2000, 50}).hmin);
                                      return worst;
                                  },
                                  1e-9});
            spec.facts.push_back({"hsc_max", "closed-form", "equal-weight direction: H = -2/(n s)",
                                  [s, n] { return -2.0 / (n * s); },
                                  [](const MetricField& f) {
                                      double worst = -1e300;
                                      for (const auto& z : f.trusted_samples(6)) worst = std::max(worst, hsc_extremes(f, z, {2000, 50}).hmax);
                                      return worst;
                                  },
                                  1e-9});
            spec.facts.push_back({"einstein_lambda", "jet-oracle", "Ric = -(2/s) g checked through -ddbar log det g",
                                  [] { return 0.0; },
                                  [s](const MetricField& f) { return zoo::einstein_deviation(f, 2.0 / s, 6); }, 1e-10});
        }
        MetricField field = metric_from_potential(geom, psi);
        return {geom, std::move(field), std::move(spec)};
    }
    if (name == "fubini-study") {
        const int n = p.n;
        const Geometry geom = Geometry::analytic_chart(n, Vector::Zero(n), 3.0, 1.0);
        ExampleSpec spec;
        spec.name = name;
        spec.substrate = SubstrateKind::AnalyticChart;
        spec.potential = "log(1 + |z|^2)";
        spec.facts.push_back({"hsc", "closed-form", "constant H = 2 for the potential log(1 + |z|^2)", [] { return 0.0; },
                              [](const MetricField& f) { return zoo::hsc_deviation(f, 2.0, 4, 500); }, 1e-9});
        spec.facts.push_back({"einstein_lambda", "jet-oracle", "Ric = (n + 1) g", [] { return 0.0; },
                              [n](const MetricField& f) { return zoo::einstein_deviation(f, -(n + 1.0), 6); }, 1e-10});
        MetricField field = metric_from_potential(geom, zoo::fubini_study_potential(n));
        return {geom, std::move(field), std::move(spec)};
    }
    if (name == "fermat-chart") {
        const int n = p.n;
        const int d = p.degree;
        if (n != 2 && n != 3) throw InvalidArgument("fermat-chart: n must be 2 or 3");
        if (d < 2) throw InvalidArgument("fermat-chart: degree must be >= 2");
        if (!(p.line_parameter > 0.0)) throw InvalidArgument("fermat-chart: line parameter must be positive");
        ExampleSpec spec;
        spec.name = name;
        spec.substrate = SubstrateKind::AnalyticChart;
        spec.potential = "log(1 + sum |z_j|^2 + |h(z)|^2), h^d = -1 - sum z_j^d";
        if (d < n + 3) spec.warnings.push_back("degree below n + 3: F_d is not of general type");
        const cd zeta = std::polar(1.0, std::numbers::pi / d);
        const double t = p.line_parameter;
        // Line {z_1 = zeta, z_2 = t, z_3 = zeta t, remaining 0} in free coordinates (z_1, z_2, z_4...).
        Vector base = Vector::Zero(n);
        base(0) = zeta;
        base(1) = t;
        Vector dir = Vector::Zero(n);
        dir(1) = 1.0;
        // Keep 1 + sum z_j^d (= t^d on the line) away from zero and the branch cut.
        const double radius = std::min(0.1, 0.2 * std::pow(t, d) / (n * d * std::pow(std::max(1.0, t) + 0.1, d - 1)));
        const Geometry geom = Geometry::analytic_chart(n, base, radius, 0.3 * radius);
        spec.marked_point = base;
        spec.marked_direction = dir;
        // On the line the restricted potential is log((1 + |zeta|^2)(1 + |t|^2)): a Fubini-Study
        // line with Gauss curvature 2, computed here from the one-variable potential.
        spec.facts.push_back({"hsc_along_line", "jet-oracle",
                              "H of the induced metric on the line, from log(2 (1 + |t|^2)) in one variable",
                              [t] {
                                  const Geometry g1 = Geometry::analytic_chart(1, Vector::Constant(1, cd(t, 0.0)), 2.0 * t + 1.0, 0.5);
                                  const MetricField line(g1, [](std::span<const Jet> z, std::span<const Jet> w) {
                                      return log(2.0 * (1.0 + z[0] * w[0]));
                                  });
                                  return hsc(line, Vector::Constant(1, cd(t, 0.0)), Direction(Vector::Constant(1, 1.0)));
                              },
                              [base, dir](const MetricField& f) { return hsc(f, base, Direction(dir)); }, 1e-9});
        MetricField field = metric_from_potential(geom, zoo::fermat_potential(n, d));
        return {geom, std::move(field), std::move(spec)};
    }
    throw InvalidArgument("unknown example: " + name);
}

}  // namespace kahler
