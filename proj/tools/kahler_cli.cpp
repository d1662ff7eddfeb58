// kahler <pipeline> [--config file] [--out dir] [--seed S] [--trials T] [--grid N] [--eps-steps K] [--parallel]
//
// Exit status: 0 all checked margins pass, 1 some check failed, 2 bad usage or config,
// 3 a pipeline raised an error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>

#include "kahler/cli/pipelines.hpp"

namespace {

using namespace kahler;
using namespace kahler::cli;

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

int list_examples() {
    for (const auto& name : example_names()) {
        ExampleParams p;
        p.n = name == "fermat-chart" || name == "poincare-polydisk" || name == "bumped-polydisk" ? 2 : 1;
        p.N = 16;
        const Example ex = make_example(name, p);
        std::cout << name << "  [" << (ex.field.is_torus() ? "torus" : "chart") << "]  " << ex.spec.potential << '\n';
        for (const auto& f : ex.spec.facts) std::cout << "    " << f.name << " (" << f.provenance << "): " << f.recipe << '\n';
        for (const auto& w : ex.spec.warnings) std::cout << "    warning: " << w << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kähler geometry workbench: Monge-Ampère continuity paths, curvature inequalities, wedge integrals"};
    std::string pipeline, config_path, out_dir;
    std::optional<unsigned long long> seed;
    std::optional<int> trials, grid, eps_steps;
    bool parallel = false, quiet = false;
    app.add_option("pipeline", pipeline, "solve-ma | continuity-path | hsc-extremes | verify-inequalities | integrals | all | list-examples");
    app.add_option("--config,-c", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out,-o", out_dir, "output directory (default: $KAHLER_OUT, then ./kahler-out)");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--trials", trials, "Royden sweep trials");
    app.add_option("--grid", grid, "torus resolution N");
    app.add_option("--eps-steps", eps_steps, "number of continuity parameters");
    app.add_flag("--parallel", parallel, "run independent sweeps on separate threads");
    app.add_flag("--quiet,-q", quiet, "do not print the summary table");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (pipeline == "list-examples") return list_examples();

    Config cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!pipeline.empty()) cfg.pipeline = pipeline;
        if (seed) cfg.seed = *seed;
        if (trials) cfg.inequalities.trials = *trials;
        if (grid) cfg.example.grid = *grid;
        if (eps_steps) cfg.continuity.steps = *eps_steps;
        if (parallel) cfg.parallel = true;
        validate(cfg);
    } catch (const KahlerError& e) {
        std::cerr << "kahler: " << e.what() << '\n';
        return 2;
    }

    fs::path out = "kahler-out";
    if (const char* env = std::getenv("KAHLER_OUT"); env && *env) out = env;
    if (!out_dir.empty()) out = out_dir;
    fs::create_directories(out);

    const std::string started = utc_timestamp();
    const auto t0 = std::chrono::steady_clock::now();
    Context ctx(cfg, out);
    int status = 0;
    std::string error;
    try {
        run_pipeline(ctx, cfg.pipeline);
    } catch (const std::exception& e) {
        error = e.what();
        std::cerr << "kahler: " << error << '\n';
        status = 3;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    try {
        json report = ctx.report.to_json(to_json(cfg));
        if (!error.empty()) report["error"] = error;
        write_json(out / "report.json", report);
        ctx.report.summary_table().save(out / "summary.csv");
        write_json(out / "run.json", {{"started_at", started}, {"wall_seconds", wall}, {"pipeline_seconds", ctx.seconds}, {"report", "report.json"}});
    } catch (const std::exception& e) {
        std::cerr << "kahler: writing reports failed: " << e.what() << '\n';
        return 3;
    }
    if (!quiet) ctx.report.print_summary(std::cout);
    if (status != 0) return status;
    return ctx.report.ok() ? 0 : 1;
}
