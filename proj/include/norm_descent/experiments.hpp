#pragma once

// Config-driven runs and the GD vs. norm-scaled signGD grid over rotated
// quadratics. Output formatting lives here so the CLI stays a thin shell.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "norm_descent/config.hpp"
#include "norm_descent/errors.hpp"
#include "norm_descent/hessian_analysis.hpp"
#include "norm_descent/optimizers.hpp"
#include "norm_descent/problems.hpp"

namespace norm_descent {

inline constexpr int kPrintDigits = 17;

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(kPrintDigits) << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// analyze

inline std::string format_report_json(const SmoothnessReport& r) {
    std::ostringstream os;
    bool first = true;
    auto field = [&](const char* name, std::optional<double> v) {
        if (!v) return;
        os << (first ? "{" : ",") << '"' << name << "\":" << format_double(*v);
        first = false;
    };
    field("L2", r.L2);
    field("Linf_exact", r.Linf_exact);
    field("rho_diag", r.rho_diag);
    field("bound_psd", r.bound_psd);
    field("bound_sym", r.bound_sym);
    field("lower_bound", r.lower_bound);
    field("lsep_rowsum", r.lsep_rowsum);
    field("lsep_exact_2x2", r.lsep_exact_2x2);
    field("ratio_dL2_over_Linf", r.ratio_dL2_over_Linf);
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// run

inline std::string format_trace_csv(const Trace& trace) {
    std::ostringstream os;
    os << "t,f,dual_grad_norm,dist_sq\n";
    for (std::size_t t = 0; t < trace.size(); ++t) {
        os << t << ',' << format_double(trace.f[t]) << ',' << format_double(trace.dual_grad_norm[t]) << ',';
        if (t < trace.dist_sq.size()) os << format_double(trace.dist_sq[t]);
        os << '\n';
    }
    return os.str();
}

namespace detail {

struct BuiltProblem {
    std::optional<QuadraticProblem> quadratic;
    std::optional<CoshProblem> cosh;
    double sigma = 0.0;

    std::size_t dim() const { return quadratic ? quadratic->dim() : cosh->dim(); }

    Oracle oracle(bool noisy, std::uint64_t noise_seed) const {
        if (cosh) return make_oracle(*cosh);
        return make_oracle(*quadratic, noisy ? sigma : 0.0, noise_seed);
    }

    double smoothness(const NormKind& kind, const json& opt) const {
        if (opt.contains("L")) {
            const double l = get_or<double>(opt, "L", 0.0);
            if (!(l > 0.0)) throw InputError("config: L must be positive");
            return l;
        }
        if (!quadratic) throw InputError("config: the cosh problem has no global smoothness constant; set 'L'");
        return smoothness_constant(quadratic->hessian(), kind);
    }
};

inline BuiltProblem build_problem(const ProblemSpec& spec) {
    BuiltProblem b;
    if (const auto* q = std::get_if<QuadraticSpec>(&spec)) {
        b.quadratic = make_quadratic(q->d, q->lambda_max, q->theta, q->seed);
        b.sigma = q->sigma;
    } else {
        b.cosh = CoshProblem(std::get<CoshSpec>(spec).d);
    }
    return b;
}

inline AdamConfig parse_adam(const json& opt, AdamVariant variant, std::size_t dim) {
    AdamConfig a;
    a.variant = variant;
    a.beta1 = get_or<double>(opt, "beta1", a.beta1);
    a.beta2 = get_or<double>(opt, "beta2", a.beta2);
    a.epsilon = get_or<double>(opt, "epsilon", a.epsilon);
    a.step = get_or<double>(opt, "step", a.step);
    if (opt.contains("blocks")) a.blocks = BlockPartition(parse_blocks(opt.at("blocks")), dim);
    return a;
}

} // namespace detail

/// Executes a run config. Throws InputError for invalid configs and
/// DivergenceError (carrying the partial trace) when the run blows up.
inline Trace execute_run(const RunConfig& cfg) {
    const auto problem = detail::build_problem(cfg.problem);
    const std::size_t d = problem.dim();
    const Vector x0 = cfg.x0 ? *cfg.x0 : standard_normal(d, cfg.x0_seed, 0);
    if (x0.size() != d) throw InputError("config: x0 has the wrong dimension");

    const json& opt = cfg.optimizer;
    const auto method = opt.at("method").get<std::string>();
    const bool stochastic_method = method == "signsgd" || method.rfind("adam", 0) == 0 || method == "momentum_sign";
    if (!stochastic_method && problem.sigma > 0.0)
        throw InputError("config: method '" + method + "' needs exact gradients; set sigma to 0");

    const Oracle oracle = problem.oracle(stochastic_method, cfg.noise_seed);
    auto norm_param = [&](const char* fallback) {
        return opt.contains("norm") ? parse_norm(opt.at("norm"), d) : parse_norm(json(fallback), d);
    };
    auto schedule = [&] { return opt.contains("schedule") ? parse_schedule(opt.at("schedule")) : StepSchedule::inv_sqrt(); };

    auto steepest = [&](const NormKind& kind) {
        return run_steepest_descent(oracle, kind, problem.smoothness(kind, opt), x0, cfg.steps);
    };

    if (method == "gd") return steepest(Euclidean{});
    if (method == "signgd_normscaled") return steepest(MaxNorm{});
    if (method == "cd") return steepest(OneNorm{});
    if (method == "blocknorm") {
        if (!opt.contains("blocks")) throw InputError("config: blocknorm needs 'blocks'");
        return steepest(BlockMax{BlockPartition(detail::parse_blocks(opt.at("blocks")), d)});
    }
    if (method == "nsd") {
        const NormKind kind = norm_param("max");
        return run_normalized_sd(oracle, kind, problem.smoothness(kind, opt), x0, cfg.steps, schedule());
    }
    if (method == "relaxed_nsd") {
        const NormKind kind = norm_param("max");
        const double l0 = detail::get_or<double>(opt, "L0", problem.cosh ? static_cast<double>(d) : 0.0);
        const double l1 = detail::get_or<double>(opt, "L1", problem.cosh ? 1.0 : 0.0);
        const double eps = detail::get_or<double>(opt, "eps", 1e-2);
        if (problem.quadratic && !opt.contains("L0")) throw InputError("config: relaxed_nsd on a quadratic needs 'L0'");
        return run_relaxed_nsd(oracle, kind, l0, l1, x0, cfg.steps, eps);
    }
    if (method == "signgd" || method == "signsgd") return run_signsgd(oracle, schedule(), x0, cfg.steps);

    static const std::pair<const char*, AdamVariant> adam_methods[] = {
        {"adam", AdamVariant::standard},
        {"adam_shuffled", AdamVariant::shuffled},
        {"adam_averaged", AdamVariant::averaged},
        {"momentum_sign", AdamVariant::momentum_sign},
    };
    for (const auto& [name, variant] : adam_methods) {
        if (method != name) continue;
        std::mt19937_64 rng(detail::get_or<std::uint64_t>(opt, "seed", 0));
        return run_adam_family(oracle, detail::parse_adam(opt, variant, d), x0, cfg.steps, rng);
    }
    throw InputError("config: unknown method '" + method + "'");
}

// ---------------------------------------------------------------------------
// quadgrid

struct GridCell {
    double lambda_max = 0.0;
    double theta = 0.0;
    double L2 = 0.0;
    double Linf = 0.0;
    double ratio_smoothness = 0.0; ///< Linf/(d·L2)
    double mean_dist_gd = 0.0;
    double mean_dist_signgd = 0.0;
    double log10_perf_ratio = 0.0; ///< log10(mean_dist_signgd/mean_dist_gd), distances floored at DBL_MIN
};

struct GridResult {
    std::vector<GridCell> cells; ///< (lambda_max, theta) lexicographic order
    /// Starting points each method consumed, per cell; filled when requested.
    std::vector<std::vector<Vector>> x0_gd;
    std::vector<std::vector<Vector>> x0_signgd;
};

/// NORM_DESCENT_THREADS when set to a positive integer, else the hardware concurrency.
inline std::size_t thread_count_from_env() {
    if (const char* env = std::getenv("NORM_DESCENT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace detail {

inline std::uint64_t noise_seed_for(std::uint64_t base, std::size_t cell, std::size_t repeat, std::size_t method,
                                    std::size_t repeats) {
    const std::uint64_t k = 1 + (static_cast<std::uint64_t>(cell) * repeats + repeat) * 2 + method;
    return base ^ (k * 0x9E3779B97F4A7C15ULL);
}

} // namespace detail

/// GD with step 1/L₂ against norm-scaled signGD with step 1/L∞ on
/// H = Q(θ)·diag(1,…,1,λ_max)·Q(θ)ᵀ, both started from the same `repeats`
/// standard-normal x₀ draws. Cells are independent and computed on up to
/// `threads` workers; the result order does not depend on scheduling.
inline GridResult run_quadgrid(const GridConfig& cfg, std::size_t threads, bool keep_x0 = false) {
    if (cfg.d > kBruteForceMaxDim)
        throw InputError("quadgrid: d = " + std::to_string(cfg.d) + " exceeds the exact-norm cap of " +
                         std::to_string(kBruteForceMaxDim));

    struct Job {
        double lambda_max, theta;
    };
    std::vector<Job> jobs;
    for (double l : cfg.lambda_max_values)
        for (double t : cfg.theta_values) jobs.push_back({l, t});
    std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        return a.lambda_max != b.lambda_max ? a.lambda_max < b.lambda_max : a.theta < b.theta;
    });

    std::vector<Vector> starts(cfg.repeats);
    for (std::size_t r = 0; r < cfg.repeats; ++r) starts[r] = standard_normal(cfg.d, cfg.x0_seed, r);

    GridResult result;
    result.cells.resize(jobs.size());
    if (keep_x0) {
        result.x0_gd.resize(jobs.size());
        result.x0_signgd.resize(jobs.size());
    }

    auto run_cell = [&](std::size_t k) {
        const auto problem = make_quadratic(cfg.d, jobs[k].lambda_max, jobs[k].theta, cfg.skew_seed);
        GridCell cell;
        cell.lambda_max = jobs[k].lambda_max;
        cell.theta = jobs[k].theta;
        cell.L2 = problem.analysis().L2;
        cell.Linf = *problem.analysis().Linf_exact;
        cell.ratio_smoothness = cell.Linf / (static_cast<double>(cfg.d) * cell.L2);

        double sum_gd = 0.0, sum_sign = 0.0;
        for (std::size_t r = 0; r < cfg.repeats; ++r) {
            const Trace gd = run_steepest_descent(
                make_oracle(problem, cfg.sigma, detail::noise_seed_for(cfg.x0_seed, k, r, 0, cfg.repeats)), Euclidean{},
                cell.L2, starts[r], cfg.steps);
            const Trace sg = run_steepest_descent(
                make_oracle(problem, cfg.sigma, detail::noise_seed_for(cfg.x0_seed, k, r, 1, cfg.repeats)), MaxNorm{},
                cell.Linf, starts[r], cfg.steps);
            sum_gd += gd.dist_sq.back();
            sum_sign += sg.dist_sq.back();
            if (keep_x0) {
                result.x0_gd[k].push_back(gd.iterates.front());
                result.x0_signgd[k].push_back(sg.iterates.front());
            }
        }
        const double n = static_cast<double>(cfg.repeats);
        cell.mean_dist_gd = sum_gd / n;
        cell.mean_dist_signgd = sum_sign / n;
        constexpr double floor = std::numeric_limits<double>::min();
        cell.log10_perf_ratio =
            std::log10(std::max(cell.mean_dist_signgd, floor)) - std::log10(std::max(cell.mean_dist_gd, floor));
        result.cells[k] = cell;
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, jobs.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                run_cell(k);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

inline std::string format_grid_csv(const std::vector<GridCell>& cells) {
    std::ostringstream os;
    os << "lambda_max,theta,L2,Linf,ratio_smoothness,mean_dist_gd,mean_dist_signgd,log10_perf_ratio\n";
    for (const auto& c : cells) {
        os << format_double(c.lambda_max) << ',' << format_double(c.theta) << ',' << format_double(c.L2) << ','
           << format_double(c.Linf) << ',' << format_double(c.ratio_smoothness) << ','
           << format_double(c.mean_dist_gd) << ',' << format_double(c.mean_dist_signgd) << ','
           << format_double(c.log10_perf_ratio) << '\n';
    }
    return os.str();
}

inline std::string format_points_csv(const std::vector<Vector>& points) {
    std::ostringstream os;
    for (const auto& p : points) {
        for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << format_double(p[i]);
        os << '\n';
    }
    return os.str();
}

} // namespace norm_descent
