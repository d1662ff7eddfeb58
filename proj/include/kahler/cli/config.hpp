#pragma once

// Experiment configuration: a nested JSON document with documented defaults.
// Unknown keys and wrong types are rejected with the offending path.

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kahler/error.hpp"
#include "kahler/zoo.hpp"

namespace kahler::cli {

using nlohmann::json;

class ConfigError : public KahlerError {
public:
    using KahlerError::KahlerError;
};

inline const std::vector<std::string>& pipeline_names() {
    static const std::vector<std::string> names{"solve-ma", "continuity-path", "hsc-extremes", "verify-inequalities", "integrals", "all"};
    return names;
}

struct ExampleConfig {
    std::string name = "perturbed-torus";
    int n = 1;
    int grid = 32;
    double amplitude = 0.02;
    std::vector<std::vector<int>> modes;
    double scale = 1.0;
    int degree = 5;
    double line_parameter = 1.0;

    ExampleParams params() const {
        ExampleParams p;
        p.n = n;
        p.N = grid;
        p.amplitude = amplitude;
        p.modes = modes;
        p.scale = scale;
        p.degree = degree;
        p.line_parameter = line_parameter;
        return p;
    }
};

struct SolverConfig {
    double tolerance = 1e-12;
    int max_iterations = 50;
    double base_scale = 1.0;       // alpha = base_scale * omega
    double target_amplitude = 0.01;  // manufactured v* = shift + a exp(sin 2 pi x1 cos 2 pi y_n)
    double target_shift = 0.3;
};

struct ContinuityConfig {
    double epsilon_start = 1.0;
    double ratio = 0.5;
    int steps = 11;
    std::string warm_start = "rescaled";  // rescaled | previous
    bool snapshots = true;
};

struct HscConfig {
    std::vector<std::string> examples{"poincare-polydisk", "fermat-chart"};
    int points = 16;
    int directions = 400;
    int refine_steps = 50;
    int bracket_directions = 20;
};

struct InequalityConfig {
    int trials = 1000;                    // Royden sweep
    int royden_dimension = 2;
    int newton_maclaurin_tuples = 100000;
    int schwarz_points = 100;
    std::vector<double> laplacian_steps{0.02, 0.01, 0.005};
    int laplacian_points = 4;
};

struct IntegralConfig {
    double shift_amplitude = 0.004;
    int kappa_points = 256;
};

struct Tolerances {
    double solver = 1e-8;
    double ricci = 1e-6;
    double volume = 1e-8;
    double closed_form = 1e-10;
    double equation = 1e-10;
    double algebraic = 1e-9;
    double newton_maclaurin = 1e-12;
    double finite_difference = 1e-6;
    double cauchy_schwarz = 1e-9;
    double laplacian_order = 3.5;
    double integral = 1e-10;
    double expansion = 1e-8;
    double nef = 1e-8;
};

struct Config {
    std::string pipeline = "all";
    unsigned long long seed = 7;
    bool parallel = false;
    ExampleConfig example;
    SolverConfig solver;
    ContinuityConfig continuity;
    HscConfig hsc;
    InequalityConfig inequalities;
    IntegralConfig integrals;
    Tolerances tolerances;
};

namespace detail {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.emplace_back(key);
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        check_type<T>(v, key);
        try {
            out = v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    Reader child(const char* key) {
        seen_.emplace_back(key);
        static const json empty = json::object();
        return Reader(j_.contains(key) ? j_.at(key) : empty, where(key));
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) throw ConfigError("unknown key " + where(k.c_str()));
    }

private:
    template <class T>
    void check_type(const json& v, const char* key) const {
        bool ok;
        if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
        else if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
        else if constexpr (std::is_integral_v<T>) ok = v.is_number_integer() && (std::is_signed_v<T> || v.get<long long>() >= 0);
        else if constexpr (std::is_floating_point_v<T>) ok = v.is_number();
        else ok = v.is_array();
        if (!ok) throw ConfigError(where(key) + " has the wrong type");
    }
    std::string where(const char* key = nullptr) const {
        std::string p = path_.empty() ? "config" : path_;
        return key ? p + "." + key : p;
    }

    const json& j_;
    std::string path_;
    std::vector<std::string> seen_;
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace detail

inline void validate(const Config& c) {
    using detail::require;
    require(std::find(pipeline_names().begin(), pipeline_names().end(), c.pipeline) != pipeline_names().end(),
            "config.pipeline: unknown pipeline '" + c.pipeline + "'");
    require(c.example.n >= 1 && c.example.n <= 3, "config.example.n must be 1..3");
    require(c.example.grid >= 8 && c.example.grid % 2 == 0, "config.example.grid must be even and >= 8");
    require(c.solver.tolerance > 0.0 && c.solver.max_iterations > 0, "config.solver: tolerance and max_iterations must be positive");
    require(c.continuity.epsilon_start > 0.0 && c.continuity.ratio > 0.0 && c.continuity.ratio < 1.0,
            "config.continuity: need epsilon_start > 0 and 0 < ratio < 1");
    require(c.continuity.steps >= 1, "config.continuity.steps must be >= 1");
    require(c.continuity.warm_start == "rescaled" || c.continuity.warm_start == "previous",
            "config.continuity.warm_start must be 'rescaled' or 'previous'");
    require(c.hsc.points >= 1 && c.hsc.directions >= 1 && c.hsc.refine_steps >= 0 && c.hsc.bracket_directions >= 0,
            "config.hsc: counts must be positive");
    const auto examples = example_names();
    for (const auto& e : c.hsc.examples)
        require(std::find(examples.begin(), examples.end(), e) != examples.end(),
                "config.hsc.examples: unknown example '" + e + "'");
    require(c.inequalities.trials >= 1 && c.inequalities.newton_maclaurin_tuples >= 1 && c.inequalities.schwarz_points >= 1 &&
                c.inequalities.laplacian_points >= 1,
            "config.inequalities: counts must be positive");
    require(c.inequalities.royden_dimension >= 1 && c.inequalities.royden_dimension <= 3, "config.inequalities.royden_dimension must be 1..3");
    require(c.inequalities.laplacian_steps.size() >= 2, "config.inequalities.laplacian_steps needs at least two steps");
    for (double h : c.inequalities.laplacian_steps) require(h > 0.0, "config.inequalities.laplacian_steps must be positive");
    require(c.integrals.kappa_points >= 1, "config.integrals.kappa_points must be positive");
}

inline Config parse_config(const json& j) {
    Config c;
    detail::Reader r(j, "");
    r.get("pipeline", c.pipeline);
    r.get("seed", c.seed);
    r.get("parallel", c.parallel);
    {
        auto e = r.child("example");
        e.get("name", c.example.name);
        e.get("n", c.example.n);
        e.get("grid", c.example.grid);
        e.get("amplitude", c.example.amplitude);
        e.get("modes", c.example.modes);
        e.get("scale", c.example.scale);
        e.get("degree", c.example.degree);
        e.get("line_parameter", c.example.line_parameter);
        e.finish();
    }
    {
        auto s = r.child("solver");
        s.get("tolerance", c.solver.tolerance);
        s.get("max_iterations", c.solver.max_iterations);
        s.get("base_scale", c.solver.base_scale);
        s.get("target_amplitude", c.solver.target_amplitude);
        s.get("target_shift", c.solver.target_shift);
        s.finish();
    }
    {
        auto s = r.child("continuity");
        s.get("epsilon_start", c.continuity.epsilon_start);
        s.get("ratio", c.continuity.ratio);
        s.get("steps", c.continuity.steps);
        s.get("warm_start", c.continuity.warm_start);
        s.get("snapshots", c.continuity.snapshots);
        s.finish();
    }
    {
        auto s = r.child("hsc");
        s.get("examples", c.hsc.examples);
        s.get("points", c.hsc.points);
        s.get("directions", c.hsc.directions);
        s.get("refine_steps", c.hsc.refine_steps);
        s.get("bracket_directions", c.hsc.bracket_directions);
        s.finish();
    }
    {
        auto s = r.child("inequalities");
        s.get("trials", c.inequalities.trials);
        s.get("royden_dimension", c.inequalities.royden_dimension);
        s.get("newton_maclaurin_tuples", c.inequalities.newton_maclaurin_tuples);
        s.get("schwarz_points", c.inequalities.schwarz_points);
        s.get("laplacian_steps", c.inequalities.laplacian_steps);
        s.get("laplacian_points", c.inequalities.laplacian_points);
        s.finish();
    }
    {
        auto s = r.child("integrals");
        s.get("shift_amplitude", c.integrals.shift_amplitude);
        s.get("kappa_points", c.integrals.kappa_points);
        s.finish();
    }
    {
        auto t = r.child("tolerances");
        auto& o = c.tolerances;
        t.get("solver", o.solver);
        t.get("ricci", o.ricci);
        t.get("volume", o.volume);
        t.get("closed_form", o.closed_form);
        t.get("equation", o.equation);
        t.get("algebraic", o.algebraic);
        t.get("newton_maclaurin", o.newton_maclaurin);
        t.get("finite_difference", o.finite_difference);
        t.get("cauchy_schwarz", o.cauchy_schwarz);
        t.get("laplacian_order", o.laplacian_order);
        t.get("integral", o.integral);
        t.get("expansion", o.expansion);
        t.get("nef", o.nef);
        t.finish();
    }
    r.finish();
    validate(c);
    return c;
}

inline Config load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(is, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

/// The effective configuration, echoed into every report.
inline json to_json(const Config& c) {
    const auto& t = c.tolerances;
    return {
        {"pipeline", c.pipeline},
        {"seed", c.seed},
        {"parallel", c.parallel},
        {"example",
         {{"name", c.example.name}, {"n", c.example.n}, {"grid", c.example.grid}, {"amplitude", c.example.amplitude},
          {"modes", c.example.modes}, {"scale", c.example.scale}, {"degree", c.example.degree},
          {"line_parameter", c.example.line_parameter}}},
        {"solver",
         {{"tolerance", c.solver.tolerance}, {"max_iterations", c.solver.max_iterations}, {"base_scale", c.solver.base_scale},
          {"target_amplitude", c.solver.target_amplitude}, {"target_shift", c.solver.target_shift}}},
        {"continuity",
         {{"epsilon_start", c.continuity.epsilon_start}, {"ratio", c.continuity.ratio}, {"steps", c.continuity.steps},
          {"warm_start", c.continuity.warm_start}, {"snapshots", c.continuity.snapshots}}},
        {"hsc",
         {{"examples", c.hsc.examples}, {"points", c.hsc.points}, {"directions", c.hsc.directions},
          {"refine_steps", c.hsc.refine_steps}, {"bracket_directions", c.hsc.bracket_directions}}},
        {"inequalities",
         {{"trials", c.inequalities.trials}, {"royden_dimension", c.inequalities.royden_dimension},
          {"newton_maclaurin_tuples", c.inequalities.newton_maclaurin_tuples}, {"schwarz_points", c.inequalities.schwarz_points},
          {"laplacian_steps", c.inequalities.laplacian_steps}, {"laplacian_points", c.inequalities.laplacian_points}}},
        {"integrals", {{"shift_amplitude", c.integrals.shift_amplitude}, {"kappa_points", c.integrals.kappa_points}}},
        {"tolerances",
         {{"solver", t.solver}, {"ricci", t.ricci}, {"volume", t.volume}, {"closed_form", t.closed_form}, {"equation", t.equation},
          {"algebraic", t.algebraic}, {"newton_maclaurin", t.newton_maclaurin}, {"finite_difference", t.finite_difference},
          {"cauchy_schwarz", t.cauchy_schwarz}, {"laplacian_order", t.laplacian_order}, {"integral", t.integral},
          {"expansion", t.expansion}, {"nef", t.nef}}},
    };
}

}  // namespace kahler::cli
