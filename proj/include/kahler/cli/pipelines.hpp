#pragma once

// Batch pipelines behind the command-line tool. Each pipeline appends check rows to
// the run report and writes its tables and field snapshots under the output directory.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <future>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kahler/cli/config.hpp"
#include "kahler/cli/report.hpp"
#include "kahler/curvature.hpp"
#include "kahler/inequalities.hpp"
#include "kahler/integrals.hpp"
#include "kahler/io.hpp"
#include "kahler/monge_ampere.hpp"
#include "kahler/zoo.hpp"

namespace kahler::cli {

namespace fs = std::filesystem;

class PipelineError : public KahlerError {
public:
    using KahlerError::KahlerError;
};

struct Context {
    Config config;
    fs::path out;
    RunReport report;
    std::map<std::string, double> seconds;  // wall time per pipeline, sidecar only

    explicit Context(Config c, fs::path dir) : config(std::move(c)), out(std::move(dir)) {}

    const Example& example() {
        if (!example_) example_ = make_example(config.example.name, config.example.params());
        return *example_;
    }
    const Example& torus_example(const std::string& pipeline) {
        const Example& ex = example();
        if (!ex.field.is_torus())
            throw PipelineError(pipeline + ": needs a torus example, got '" + config.example.name + "'");
        return ex;
    }
    std::vector<double> schedule() const {
        return geometric_schedule(config.continuity.epsilon_start, config.continuity.ratio, config.continuity.steps);
    }
    const std::vector<ContinuityState>& path(const std::string& pipeline) {
        if (!path_) {
            const Example& ex = torus_example(pipeline);
            ContinuityOptions opt;
            opt.newton.tol = config.solver.tolerance;
            opt.newton.max_iterations = config.solver.max_iterations;
            opt.warm_start = config.continuity.warm_start == "previous" ? WarmStart::Previous : WarmStart::Rescaled;
            path_ = continuity_path(ex.field, schedule(), opt);
        }
        return *path_;
    }
    const KappaFloor& kappa() {
        if (!kappa_) {
            KappaOptions opt;
            opt.search = {config.hsc.directions, config.hsc.refine_steps};
            opt.max_points = config.integrals.kappa_points;
            kappa_ = kappa_floor(example().field, opt);
        }
        return *kappa_;
    }

    fs::path artifact(const std::string& relative) {
        const fs::path p = out / relative;
        fs::create_directories(p.parent_path());
        report.add_artifact(relative);
        return p;
    }

private:
    std::optional<Example> example_;
    std::optional<std::vector<ContinuityState>> path_;
    std::optional<KappaFloor> kappa_;
};

namespace detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::string point_label(const std::vector<double>& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + format_double(x[i]);
    return s;
}

/// lhs = bound, rhs = measured: passes when measured <= bound.
inline InequalityReport at_most(std::string name, double measured, double bound) {
    InequalityReport r = make_report(std::move(name), bound, measured, 0.0);
    r.tolerance = bound;
    return r;
}

inline ExampleParams chart_params(int n, double scale = 1.0) {
    ExampleParams p;
    p.n = n;
    p.scale = scale;
    return p;
}

inline Example chart_example(const std::string& name, int n) {
    ExampleParams p;
    p.n = name == "poincare-disk" ? 1 : n;
    return make_example(name, p);
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline void run_solve_ma(Context& ctx) {
    const std::string P = "solve-ma";
    const auto& cfg = ctx.config;
    const Example& ex = ctx.torus_example(P);
    const MetricField& omega = ex.field;
    MAProblem prob{omega.spectral_ptr(), omega.metric(), omega.metric(), {}};
    for (auto& x : prob.base.data) x *= cfg.solver.base_scale;

    const double a = cfg.solver.target_amplitude, shift = cfg.solver.target_shift;
    const ScalarField target = sample_on_grid(ex.geometry.grid, [a, shift](std::span<const double> x) {
        return shift + a * std::exp(std::sin(detail::kTwoPi * x[0]) * std::cos(detail::kTwoPi * x.back()));
    });
    const MatrixField lhs = kahler::detail::add_ddbar(omega.spectral(), prob.base, target);
    prob.datum.resize(target.size());
    for (std::size_t p = 0; p < target.size(); ++p) {
        const double det = lhs.at(p).determinant().real();
        if (!(det > 0.0)) throw PipelineError(P + ": manufactured target is not admissible; lower solver.target_amplitude");
        prob.datum[p] = std::log(det) - std::log(prob.reference.at(p).determinant().real()) - target[p];
    }

    NewtonOptions opt;
    opt.tol = cfg.solver.tolerance;
    opt.max_iterations = cfg.solver.max_iterations;
    const SolveReport sol = solve_ma(prob, opt);
    double err = 0.0;
    for (std::size_t p = 0; p < target.size(); ++p) err = std::max(err, std::abs(sol.v[p] - target[p]));

    ctx.report.add(P, detail::at_most("manufactured_solution_error", err, cfg.tolerances.solver));
    ctx.report.add(P, detail::at_most("equation_residual", sol.verified_residual, cfg.tolerances.solver));
    ctx.report.add_info(P, "newton_iterations", sol.iterations);
    ctx.report.add_info(P, "linear_iterations", sol.linear_iterations);

    CsvTable t({"iteration", "residual"});
    for (std::size_t k = 0; k < sol.residuals.size(); ++k) t.row({CsvTable::cell(k), CsvTable::cell(sol.residuals[k])});
    t.save(ctx.artifact("solve_ma/newton.csv"));
    save_field(ctx.artifact("solve_ma/solution.khlf"), FieldSnapshot::scalar(ex.geometry.grid, sol.v));
}

// ---------------------------------------------------------------------------

inline void run_continuity_path(Context& ctx) {
    const std::string P = "continuity-path";
    const auto& tol = ctx.config.tolerances;
    const Example& ex = ctx.torus_example(P);
    const auto& path = ctx.path(P);
    const int n = ex.field.dim();
    const bool flat = kahler::detail::is_flat(ex.field);

    CsvTable t({"index", "epsilon", "sup_u", "log_C", "ricci_residual", "ma_residual", "volume", "volume_from_u", "S_min", "S_max",
                "newton_iterations"});
    double worst_ricci = 0.0, worst_bound = std::numeric_limits<double>::infinity(), worst_eq = 0.0, worst_closed = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto& st = path[k];
        const auto& d = st.diag;
        t.row({CsvTable::cell(k), CsvTable::cell(st.epsilon), CsvTable::cell(d.sup_u), CsvTable::cell(d.log_C),
               CsvTable::cell(d.ricci_residual), CsvTable::cell(d.ma_residual), CsvTable::cell(d.volume), CsvTable::cell(d.volume_from_u),
               CsvTable::cell(d.S_min), CsvTable::cell(d.S_max), CsvTable::cell(d.newton_iterations)});
        const std::string tag = "[" + std::to_string(k) + "]";
        ctx.report.add(P, detail::at_most("ricci_identity_residual" + tag, d.ricci_residual, tol.ricci));
        ctx.report.add(P, make_report("sup_u_bound" + tag, d.log_C, d.sup_u, tol.closed_form));
        ctx.report.add(P, make_report("volume_equation" + tag, d.volume, d.volume_from_u, tol.equation, true));
        worst_ricci = std::max(worst_ricci, d.ricci_residual);
        worst_bound = std::min(worst_bound, d.log_C - d.sup_u);
        worst_eq = std::max(worst_eq, std::abs(d.volume - d.volume_from_u));
        if (flat) {
            double e = 0.0;
            for (double u : st.u) e = std::max(e, std::abs(u - n * std::log(st.epsilon)));
            ctx.report.add(P, detail::at_most("flat_closed_form" + tag, e, tol.closed_form));
            worst_closed = std::max(worst_closed, e);
        }
        if (ctx.config.continuity.snapshots)
            save_field(ctx.artifact("continuity/u_" + std::to_string(k) + ".khlf"), FieldSnapshot::scalar(ex.geometry.grid, st.u));
    }
    t.save(ctx.artifact("continuity/path.csv"));
    if (!path.empty()) {
        std::ofstream csv(ctx.artifact("continuity/u_last.csv"));
        write_field_csv(csv, FieldSnapshot::scalar(ex.geometry.grid, path.back().u));
    }

    const LimitReport lim = limit_probe(path, ex.field);
    ctx.report.add_info(P, "limit_cauchy", lim.cauchy);
    ctx.report.add_info(P, "limit_note", lim.note);
    ctx.report.add_info(P, "worst_ricci_residual", worst_ricci);
    ctx.report.add_info(P, "worst_sup_u_margin", worst_bound);
    ctx.report.add_info(P, "worst_volume_equation", worst_eq);
    if (flat) ctx.report.add_info(P, "worst_flat_closed_form", worst_closed);
}

// ---------------------------------------------------------------------------

inline void hsc_for_example(Context& ctx, const Example& ex, const std::string& label, CsvTable& table) {
    const std::string P = "hsc-extremes";
    const auto& cfg = ctx.config;
    const HscSearchOptions search{cfg.hsc.directions, cfg.hsc.refine_steps};
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd;
    const int n = ex.field.dim();
    double bracket = std::numeric_limits<double>::infinity();
    for (const auto& z : ex.field.trusted_samples(cfg.hsc.points)) {
        const HscExtremes e = hsc_extremes(ex.field, z, search);
        table.row({CsvTable::cell(label), CsvTable::cell(detail::point_label(ex.field.real_coords(z))), CsvTable::cell(e.hmin),
                   CsvTable::cell(e.hmax)});
        for (int d = 0; d < cfg.hsc.bracket_directions; ++d) {
            Vector eta(n);
            for (int i = 0; i < n; ++i) eta(i) = cd(nd(rng), nd(rng));
            const double h = hsc(ex.field, z, Direction(eta));
            bracket = std::min({bracket, h - e.hmin, e.hmax - h});
        }
    }
    if (cfg.hsc.bracket_directions > 0) ctx.report.add(P, make_report(label + "/bracket", bracket, 0.0, 1e-8));
    for (const auto& f : verify_facts(ex)) {
        InequalityReport r = make_report(label + "/fact:" + f.name, f.measured, f.oracle, f.tolerance, true);
        r.note = f.provenance;
        ctx.report.add(P, std::move(r));
    }
    if (ex.spec.name == "fermat-chart") {
        const double h = hsc(ex.field, ex.spec.marked_point, Direction(ex.spec.marked_direction));
        InequalityReport r = make_report(label + "/line_direction_hsc_positive", h, 0.0, 0.0);
        r.pass = h > 0.0;
        r.point = ex.field.real_coords(ex.spec.marked_point);
        ctx.report.add(P, std::move(r));
    }
}

inline void run_hsc_extremes(Context& ctx) {
    CsvTable table({"example", "point", "hmin", "hmax"});
    const Example& own = ctx.example();
    hsc_for_example(ctx, own, own.spec.name, table);
    const KappaFloor& kf = ctx.kappa();
    ctx.report.add_info("hsc-extremes", "kappa0", kf.kappa0);
    ctx.report.add_info("hsc-extremes", "nonnegative_hmax_points", kf.nonnegative_hmax_points);
    for (const auto& name : ctx.config.hsc.examples) {
        if (name == own.spec.name) continue;
        hsc_for_example(ctx, detail::chart_example(name, 2), name, table);
    }
    table.save(ctx.artifact("hsc/extremes.csv"));
}

// ---------------------------------------------------------------------------

namespace detail {

struct SweepResults {
    NewtonMaclaurinSweep newton;
    RoydenSweep royden;
    std::vector<InequalityReport> schwarz;
};

inline std::vector<InequalityReport> schwarz_on_bumped_polydisk(int points) {
    const auto omega = make_example("poincare-polydisk", detail::chart_params(2));
    const auto omega_prime = make_example("bumped-polydisk", detail::chart_params(2));
    std::vector<InequalityReport> out;
    for (const auto& z : omega_prime.field.trusted_samples(points)) {
        const auto hyp = schwarz_hypotheses_at(omega.field, omega_prime.field, z);
        out.push_back(schwarz_conclusion_check(omega.field, omega_prime.field, hyp, z));
    }
    return out;
}

}  // namespace detail

inline void run_verify_inequalities(Context& ctx) {
    const std::string P = "verify-inequalities";
    const auto& cfg = ctx.config;
    const auto& tol = cfg.tolerances;
    const auto& ic = cfg.inequalities;

    // The three sweeps are independent; with --parallel they run on separate threads
    // and are merged in this fixed order.
    auto newton = [&] { return newton_maclaurin_sweep(ic.newton_maclaurin_tuples, cfg.seed, tol.newton_maclaurin); };
    auto royden = [&] { return royden_sweep(ic.royden_dimension, ic.trials, cfg.seed); };
    auto schwarz = [&] { return detail::schwarz_on_bumped_polydisk(ic.schwarz_points); };
    detail::SweepResults res;
    if (cfg.parallel) {
        auto f1 = std::async(std::launch::async, newton);
        auto f2 = std::async(std::launch::async, royden);
        auto f3 = std::async(std::launch::async, schwarz);
        res = {f1.get(), f2.get(), f3.get()};
    } else {
        res = {newton(), royden(), schwarz()};
    }

    ctx.report.add(P, make_report("newton_maclaurin/worst_margin", res.newton.worst_margin, 0.0, tol.newton_maclaurin));
    ctx.report.add(P, detail::at_most("newton_maclaurin/equality_mismatches", res.newton.equality_mismatches, 0.0));
    ctx.report.add_info(P, "newton_maclaurin_tuples", res.newton.tuples);

    ctx.report.add(P, make_report("royden/worst_margin", res.royden.worst_margin, 0.0, tol.algebraic));
    ctx.report.add_info(P, "royden_failures", res.royden.failures);
    CsvTable rt({"trial", "lhs", "rhs", "margin"});
    for (std::size_t t = 0; t < res.royden.reports.size(); ++t) {
        const auto& r = res.royden.reports[t];
        rt.row({CsvTable::cell(t), CsvTable::cell(r.lhs), CsvTable::cell(r.rhs), CsvTable::cell(r.margin)});
    }
    rt.save(ctx.artifact("inequalities/royden.csv"));

    {
        KahlerCurvature r(1);
        const double kappa = 0.7;
        r(0, 0, 0, 0) = -kappa;
        const std::vector<double> d{2.5};
        const auto rep = royden_margin(r, HermitianMetric::identity(1), HermitianMetric::diagonal(d), kappa);
        ctx.report.add(P, make_report("royden/equality_one_dimension", rep.lhs, rep.rhs, 1e-12, true));
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> nd;
        const int n = ic.royden_dimension;
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = cd(nd(rng), nd(rng));
        const Matrix gm = a * a.adjoint() + 0.2 * Matrix::Identity(n, n);
        const HermitianMetric g(0.5 * (gm + gm.adjoint()));
        const double c = 1.3;
        const auto model = royden_margin(constant_hsc_tensor(g.matrix(), c), g, g, c);
        ctx.report.add(P, make_report("royden/equality_constant_hsc", model.lhs, model.rhs, 1e-12, true));
    }

    double worst = std::numeric_limits<double>::infinity();
    int na = 0;
    CsvTable st({"point", "lhs", "rhs", "margin", "status"});
    for (const auto& r : res.schwarz) {
        st.row({CsvTable::cell(detail::point_label(r.point)), CsvTable::cell(r.lhs), CsvTable::cell(r.rhs), CsvTable::cell(r.margin),
                CsvTable::cell(to_string(r.status))});
        if (r.status == ReportStatus::NotApplicable) ++na;
        else worst = std::min(worst, r.margin);
    }
    st.save(ctx.artifact("inequalities/schwarz.csv"));
    InequalityReport sw = make_report("schwarz/bumped_polydisk_worst_margin", worst, 0.0, tol.finite_difference);
    sw.note = std::to_string(res.schwarz.size() - na) + " points checked, " + std::to_string(na) + " not applicable";
    ctx.report.add(P, std::move(sw));

    {
        const auto disk = make_example("poincare-disk");
        double both = 0.0;
        for (const auto& z : disk.field.trusted_samples(5)) {
            const auto hyp = schwarz_hypotheses_at(disk.field, disk.field, z);
            const auto rep = schwarz_conclusion_check(disk.field, disk.field, hyp, z);
            if (rep.status != ReportStatus::Checked) throw PipelineError(P + ": Poincaré disk hypotheses unexpectedly fail");
            both = std::max({both, std::abs(rep.lhs), std::abs(rep.rhs)});
        }
        ctx.report.add(P, detail::at_most("schwarz/disk_einstein_equality", both, 1e-8));
    }

    // Laplacian identity with a flat ambient metric.
    {
        ExampleParams tp;
        const Example& own = ctx.example();
        const bool torus = own.field.is_torus();
        tp.n = torus ? own.field.dim() : 2;
        tp.N = torus ? own.geometry.grid.N : 16;
        const Example flat = make_example("flat-torus", tp);
        const Example prime = torus && !kahler::detail::is_flat(own.field) ? own : make_example("perturbed-torus", tp);
        const int n = tp.n;
        double cs = std::numeric_limits<double>::infinity(), worst_ratio = std::numeric_limits<double>::infinity();
        CsvTable lt({"point", "step", "identity_residual", "tolerance"});
        for (int q = 0; q < ic.laplacian_points; ++q) {
            Vector Pz(n);
            for (int i = 0; i < n; ++i) Pz(i) = cd(std::fmod(0.13 + 0.29 * q + 0.1 * i, 1.0), std::fmod(0.31 + 0.17 * q, 1.0));
            double prev = 0.0;
            for (double h : ic.laplacian_steps) {
                const auto c = laplacian_identity_check(flat.field, prime.field, Pz, h);
                lt.row({CsvTable::cell(detail::point_label(prime.field.real_coords(Pz))), CsvTable::cell(h),
                        CsvTable::cell(c.identity.margin), CsvTable::cell(c.identity.tolerance)});
                InequalityReport id = c.identity;
                id.name = "laplacian_identity/point" + std::to_string(q) + "/h=" + format_double(h);
                ctx.report.add(P, std::move(id));
                const double r = std::abs(c.identity.margin);
                if (prev > 0.0 && r > 0.0) worst_ratio = std::min(worst_ratio, prev / r);
                prev = r;
                cs = std::min({cs, c.diagonal_terms.margin, c.gradient_bound.margin});
            }
        }
        lt.save(ctx.artifact("inequalities/laplacian.csv"));
        if (std::isfinite(worst_ratio))
            ctx.report.add(P, make_report("laplacian_identity/order_ratio", worst_ratio, tol.laplacian_order, 0.0));
        else
            ctx.report.add(P, not_applicable("laplacian_identity/order_ratio", "residual vanishes at every step"));
        ctx.report.add(P, make_report("laplacian_identity/cauchy_schwarz", cs, 0.0, tol.cauchy_schwarz));
    }

    // Maximum-principle bound: checked on the polydisk, not applicable when kappa_0 <= 0.
    {
        const auto omega = make_example("poincare-polydisk", detail::chart_params(2));
        const auto omega_prime = make_example("poincare-polydisk", detail::chart_params(2, 2.0));
        const double kappa0 = kappa_floor(omega.field, {{cfg.hsc.directions, cfg.hsc.refine_steps}, 64}).kappa0;
        std::vector<double> S;
        for (const auto& z : omega.field.trusted_samples(ic.schwarz_points))
            S.push_back(trace_S(HermitianMetric(omega.field.metric_at(z)), HermitianMetric(omega_prime.field.metric_at(z))));
        InequalityReport mp = max_principle_S_bound(kappa0, S, 2, tol.algebraic);
        mp.name = "max_principle_S_bound/polydisk";
        ctx.report.add(P, std::move(mp));

        // The configured example has no companion metric here; it only contributes the
        // hypothesis-failure row.
        const KappaFloor& kf = ctx.kappa();
        if (!(kf.kappa0 > 0.0)) {
            InequalityReport own = not_applicable("max_principle_S_bound/" + ctx.config.example.name,
                                                  "kappa_0 = " + format_double(kf.kappa0 + 0.0) + " <= 0; Hmax >= 0 at " +
                                                      std::to_string(kf.nonnegative_hmax_points) + " of " + std::to_string(kf.samples) +
                                                      " sampled points");
            ctx.report.add(P, std::move(own));
        }
    }
}

// ---------------------------------------------------------------------------

inline void run_integrals(Context& ctx) {
    const std::string P = "integrals";
    const auto& cfg = ctx.config;
    const auto& tol = cfg.tolerances;
    const Example& ex = ctx.torus_example(P);
    const auto& path = ctx.path(P);
    const int n = ex.field.dim();
    const MatrixField& g = ex.field.metric();
    const double vol_omega = wedge_integral(g, g, n).value;

    // Cohomological invariance under a dd^c shift of either factor.
    if (!path.empty()) {
        const double a = cfg.integrals.shift_amplitude;
        const ScalarField phi = sample_on_grid(ex.geometry.grid, [a](std::span<const double> x) {
            return a * std::exp(std::cos(detail::kTwoPi * x[0]) + 0.5 * std::sin(detail::kTwoPi * x[1]));
        });
        const MatrixField& A = path.back().omega_eps;
        const MatrixField A2 = kahler::detail::add_ddbar(ex.field.spectral(), A, phi);
        const MatrixField B2 = kahler::detail::add_ddbar(ex.field.spectral(), g, phi);
        for (int k = 0; k <= n; ++k) {
            const double base = wedge_integral(A, g, k).value;
            const double s1 = wedge_integral(A2, g, k).value, s2 = wedge_integral(A, B2, k).value;
            const double shifted = std::abs(s1 - base) > std::abs(s2 - base) ? s1 : s2;
            ctx.report.add(P, make_report("ddc_shift_invariance/k" + std::to_string(k), shifted, base, tol.integral, true));
        }
    }

    CsvTable vt({"epsilon", "volume", "class_volume"});
    for (const auto& st : path) {
        const double v = wedge_integral(st.omega_eps, g, n).value;
        const double expected = std::pow(st.epsilon, n) * vol_omega;
        vt.row({CsvTable::cell(st.epsilon), CsvTable::cell(v), CsvTable::cell(expected)});
        ctx.report.add(P, make_report("volume_class/eps=" + format_double(st.epsilon), v, expected, tol.volume, true));
    }
    vt.save(ctx.artifact("integrals/volume.csv"));

    if (static_cast<int>(path.size()) >= std::max(3, n + 2)) {
        const ExpansionReport er = epsilon_expansion_check(path, ex.field, tol.expansion);
        for (std::size_t j = 0; j < er.coefficients.size(); ++j)
            ctx.report.add(P, make_report("epsilon_expansion/coefficient" + std::to_string(j), er.coefficients[j], er.expected[j],
                                          tol.expansion, true));
        ctx.report.add_info(P, "expansion_condition_number", er.condition_number);
    } else {
        ctx.report.add(P, not_applicable("epsilon_expansion", "needs at least " + std::to_string(std::max(3, n + 2)) + " states"));
    }

    if (!path.empty()) {
        const double C = std::exp(path.front().diag.log_C);
        CsvTable nt({"epsilon", "k", "mixed_integral", "lower_bound", "margin"});
        for (const auto& row : nef_lower_bound_check(path, ex.field, C, tol.nef)) {
            nt.row({CsvTable::cell(row.epsilon), CsvTable::cell(row.k), CsvTable::cell(row.bound.lhs), CsvTable::cell(row.bound.rhs),
                    CsvTable::cell(row.bound.margin)});
            InequalityReport r = row.bound;
            r.name = "nef_lower_bound/k" + std::to_string(row.k) + "/eps=" + format_double(row.epsilon);
            ctx.report.add(P, std::move(r));
        }
        nt.save(ctx.artifact("integrals/nef.csv"));
    }

    const KappaFloor& kf = ctx.kappa();
    const BignessReport big = bigness_bound_report(kf, ex.field, path, tol.volume);
    if (big.status == ReportStatus::NotApplicable) {
        InequalityReport r = not_applicable("bigness_bound", big.note);
        r.point = big.worst_point;
        ctx.report.add(P, std::move(r));
    } else {
        for (const auto& s : big.states) {
            const std::string tag = "/eps=" + format_double(s.epsilon);
            for (InequalityReport r : {s.volume_bound, s.trace_chain, s.S_bound}) {
                r.name = "bigness_bound/" + r.name + tag;
                ctx.report.add(P, std::move(r));
            }
        }
    }
    double smax = 0.0;
    for (const auto& st : path) smax = std::max(smax, st.diag.S_max);
    InequalityReport mp = max_principle_S_bound(kf.kappa0, std::vector<double>{smax}, n, tol.algebraic);
    if (mp.status == ReportStatus::NotApplicable) mp.note = big.status == ReportStatus::NotApplicable ? big.note : mp.note;
    mp.name = "max_principle_S_bound";
    ctx.report.add(P, std::move(mp));
}

// ---------------------------------------------------------------------------

inline const std::map<std::string, std::function<void(Context&)>>& pipelines() {
    static const std::map<std::string, std::function<void(Context&)>> table{
        {"solve-ma", run_solve_ma},
        {"continuity-path", run_continuity_path},
        {"hsc-extremes", run_hsc_extremes},
        {"verify-inequalities", run_verify_inequalities},
        {"integrals", run_integrals},
    };
    return table;
}

/// Runs one pipeline (or all, in a fixed order). Module errors propagate with the
/// pipeline name prepended.
inline void run_pipeline(Context& ctx, const std::string& name) {
    std::vector<std::string> order;
    if (name == "all") order = {"solve-ma", "continuity-path", "hsc-extremes", "verify-inequalities", "integrals"};
    else if (pipelines().count(name)) order = {name};
    else throw ConfigError("unknown pipeline '" + name + "'");
    const bool torus = ctx.example().field.is_torus();
    for (const auto& p : order) {
        if (name == "all" && !torus && p != "hsc-extremes" && p != "verify-inequalities") {
            ctx.report.add(p, not_applicable(p, "needs a torus example, got '" + ctx.config.example.name + "'"));
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            pipelines().at(p)(ctx);
        } catch (const PipelineError&) {
            throw;
        } catch (const std::exception& e) {
            throw PipelineError(p + ": " + e.what());
        }
        ctx.seconds[p] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
}

}  // namespace kahler::cli
