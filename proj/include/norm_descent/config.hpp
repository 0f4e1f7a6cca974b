#pragma once

// JSON configuration schema shared by the CLI: norm descriptors, problem
// specs, optimizer specs and the quadratic grid.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "norm_descent/errors.hpp"
#include "norm_descent/linalg.hpp"
#include "norm_descent/norms.hpp"
#include "norm_descent/optimizers.hpp"

namespace norm_descent {

using json = nlohmann::json;

struct QuadraticSpec {
    std::size_t d = 2;
    double lambda_max = 1.0;
    double theta = 0.0;
    std::uint64_t seed = 0;
    double sigma = 0.0;
};

struct CoshSpec {
    std::size_t d = 1;
};

using ProblemSpec = std::variant<QuadraticSpec, CoshSpec>;

struct RunConfig {
    ProblemSpec problem;
    json optimizer;            ///< {"method": …, params…}; validated when the run starts
    std::size_t steps = 100;   ///< "T"
    std::optional<Vector> x0;
    std::uint64_t x0_seed = 0;
    std::uint64_t noise_seed = 0;
};

struct GridConfig {
    std::size_t d = 8;
    std::vector<double> lambda_max_values{1, 2, 5, 10, 20, 50, 100};
    std::vector<double> theta_values{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::size_t steps = 100; ///< "T"
    std::size_t repeats = 64;
    std::uint64_t skew_seed = 0;
    std::uint64_t x0_seed = 0;
    double sigma = 0.0;
};

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("config: field '") + key + "': " + e.what());
    }
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("config: missing field '") + key + "'");
    return get_or<T>(j, key, T{});
}

inline std::size_t get_count(const json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw InputError(std::string("config: field '") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

inline std::vector<std::vector<std::size_t>> parse_blocks(const json& j) {
    if (!j.is_array()) throw InputError("config: blocks must be an array of index arrays");
    try {
        return j.get<std::vector<std::vector<std::size_t>>>();
    } catch (const json::exception&) {
        throw InputError("config: blocks must be an array of index arrays");
    }
}

} // namespace detail

/// "euclidean" | "max" | "one" | {"weighted": [l…]} | {"blockmax": [[i…], …]}
inline NormKind parse_norm(const json& j, std::size_t dim) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "euclidean") return Euclidean{};
        if (s == "max") return MaxNorm{};
        if (s == "one") return OneNorm{};
        throw InputError("config: unknown norm '" + s + "'");
    }
    if (j.is_object() && j.size() == 1) {
        if (j.contains("weighted")) {
            const auto w = detail::get_or<Vector>(j, "weighted", {});
            if (w.size() != dim) throw InputError("config: weighted norm needs one weight per coordinate");
            return WeightedDiag(w);
        }
        if (j.contains("blockmax")) return BlockMax{BlockPartition(detail::parse_blocks(j.at("blockmax")), dim)};
    }
    throw InputError("config: norm must be a name or a {\"weighted\"|\"blockmax\": …} object");
}

inline json norm_to_json(const NormKind& kind) {
    return std::visit(detail::overloaded{[](const Euclidean&) { return json("euclidean"); },
                                         [](const MaxNorm&) { return json("max"); },
                                         [](const OneNorm&) { return json("one"); },
                                         [](const WeightedDiag& w) { return json{{"weighted", w.weights}}; },
                                         [](const BlockMax& b) { return json{{"blockmax", b.partition.blocks()}}; }},
                      kind);
}

inline ProblemSpec parse_problem(const json& j) {
    if (!j.is_object() || j.size() != 1) throw InputError("config: problem must be {\"quadratic\": …} or {\"cosh\": …}");
    if (j.contains("quadratic")) {
        const json& q = j.at("quadratic");
        QuadraticSpec s;
        s.d = detail::get_count(q, "d", 0);
        if (!q.contains("d")) throw InputError("config: quadratic needs 'd'");
        s.lambda_max = detail::get_or<double>(q, "lambda_max", 1.0);
        s.theta = detail::get_or<double>(q, "theta", 0.0);
        s.seed = detail::get_or<std::uint64_t>(q, "seed", 0);
        s.sigma = detail::get_or<double>(q, "sigma", 0.0);
        if (s.d < 2) throw InputError("config: quadratic d must be at least 2");
        if (!(s.lambda_max >= 1.0)) throw InputError("config: lambda_max must be >= 1");
        if (!(s.theta >= 0.0 && s.theta <= 1.0)) throw InputError("config: theta must lie in [0, 1]");
        if (!(s.sigma >= 0.0)) throw InputError("config: sigma must be non-negative");
        return s;
    }
    if (j.contains("cosh")) {
        const json& c = j.at("cosh");
        if (!c.contains("d")) throw InputError("config: cosh needs 'd'");
        return CoshSpec{detail::get_count(c, "d", 0)};
    }
    throw InputError("config: unknown problem type");
}

/// "inv_sqrt" | {"inv_sqrt": α} | {"constant": α}
inline StepSchedule parse_schedule(const json& j) {
    if (j.is_string() && j.get<std::string>() == "inv_sqrt") return StepSchedule::inv_sqrt();
    if (j.is_object() && j.size() == 1) {
        if (j.contains("constant")) return StepSchedule::constant(detail::get_or<double>(j, "constant", 0.0));
        if (j.contains("inv_sqrt")) return StepSchedule::inv_sqrt(detail::get_or<double>(j, "inv_sqrt", 1.0));
    }
    throw InputError("config: schedule must be \"inv_sqrt\", {\"inv_sqrt\": a} or {\"constant\": a}");
}

inline RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw InputError("config: top level must be an object");
    RunConfig c;
    c.problem = parse_problem(detail::require<json>(j, "problem"));
    c.optimizer = detail::require<json>(j, "optimizer");
    if (!c.optimizer.is_object() || !c.optimizer.contains("method") || !c.optimizer.at("method").is_string())
        throw InputError("config: optimizer needs a string 'method'");
    c.steps = detail::get_count(j, "T", 100);
    if (j.contains("x0")) c.x0 = detail::get_or<Vector>(j, "x0", {});
    c.x0_seed = detail::get_or<std::uint64_t>(j, "x0_seed", 0);
    c.noise_seed = detail::get_or<std::uint64_t>(j, "noise_seed", 0);
    return c;
}

inline GridConfig parse_grid_config(const json& j) {
    if (!j.is_object()) throw InputError("config: top level must be an object");
    GridConfig g;
    if (!j.contains("d")) throw InputError("config: grid needs 'd'");
    g.d = detail::get_count(j, "d", 0);
    g.lambda_max_values = detail::get_or(j, "lambda_max_values", g.lambda_max_values);
    g.theta_values = detail::get_or(j, "theta_values", g.theta_values);
    g.steps = detail::get_count(j, "T", g.steps);
    g.repeats = detail::get_count(j, "repeats", g.repeats);
    g.skew_seed = detail::get_or<std::uint64_t>(j, "skew_seed", 0);
    g.x0_seed = detail::get_or<std::uint64_t>(j, "x0_seed", 0);
    g.sigma = detail::get_or<double>(j, "sigma", 0.0);

    if (g.d < 2) throw InputError("config: grid d must be at least 2");
    if (g.lambda_max_values.empty() || g.theta_values.empty()) throw InputError("config: grid value lists must be non-empty");
    for (double l : g.lambda_max_values)
        if (!(l >= 1.0)) throw InputError("config: lambda_max values must be >= 1");
    for (double t : g.theta_values)
        if (!(t >= 0.0 && t <= 1.0)) throw InputError("config: theta values must lie in [0, 1]");
    if (g.repeats < 1) throw InputError("config: repeats must be >= 1");
    if (!(g.sigma >= 0.0)) throw InputError("config: sigma must be non-negative");
    return g;
}

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config: invalid JSON: ") + e.what());
    }
}

} // namespace norm_descent
