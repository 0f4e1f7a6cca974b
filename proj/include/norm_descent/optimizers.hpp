#pragma once

// Iterative methods built on the steepest-descent operator, plus the Adam
// family. Every run evaluates the oracle at x_0, …, x_T and records one
// Trace row per evaluation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "norm_descent/errors.hpp"
#include "norm_descent/linalg.hpp"
#include "norm_descent/norms.hpp"
#include "norm_descent/problems.hpp"

namespace norm_descent {

inline constexpr double kDivergenceThreshold = 1e12;
inline constexpr double kStationaryTol = 1e-14;

struct Trace {
    NormKind geometry;                ///< norm whose dual measures the gradient
    std::vector<double> f;
    std::vector<double> dual_grad_norm;
    std::vector<double> dist_sq;      ///< ‖x_t − x*‖₂²; empty when the optimum is unknown
    std::vector<Vector> iterates;
    std::optional<std::size_t> first_hit; ///< relaxed_nsd: first t with ‖∇f_t‖* ≤ ε

    std::size_t size() const noexcept { return f.size(); }
    const Vector& final_iterate() const { return iterates.back(); }
};

class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, Trace partial)
        : Error("divergence at step " + std::to_string(step)), step_(step), partial_(std::move(partial)) {}

    std::size_t step() const noexcept { return step_; }
    const Trace& partial() const noexcept { return partial_; }

private:
    std::size_t step_;
    Trace partial_;
};

/// constant: α_t = α; inv_sqrt: α_t = α/√(t+1) (α = 1 by default).
struct StepSchedule {
    enum class Kind { constant, inv_sqrt };
    Kind kind = Kind::inv_sqrt;
    double alpha = 1.0;

    static StepSchedule constant(double a) { return {Kind::constant, a}; }
    static StepSchedule inv_sqrt(double a = 1.0) { return {Kind::inv_sqrt, a}; }

    double at(std::size_t t) const {
        return kind == Kind::constant ? alpha : alpha / std::sqrt(static_cast<double>(t) + 1.0);
    }
};

namespace detail {

inline void check_start(const Oracle& oracle, std::span<const double> x0) {
    if (!oracle.evaluate) throw InputError("optimizer: oracle has no evaluate function");
    if (x0.size() != oracle.dim) throw InputError("optimizer: x0 dimension differs from the oracle");
    if (!all_finite(x0)) throw InputError("optimizer: x0 must be finite");
}

class Recorder {
public:
    Recorder(const Oracle& oracle, NormKind geometry) : oracle_(oracle) { trace_.geometry = std::move(geometry); }

    /// Evaluates at x, validates, and appends a row. Returns the evaluation and ‖g‖*.
    std::pair<Evaluation, double> observe(std::span<const double> x) {
        const std::size_t t = trace_.size();
        Evaluation e = oracle_.evaluate(x);
        if (!std::isfinite(e.value) || !all_finite(e.gradient) || e.value > kDivergenceThreshold ||
            !all_finite(x))
            throw DivergenceError(t, std::move(trace_));
        const double dn = dual_norm(e.gradient, trace_.geometry);
        trace_.f.push_back(e.value);
        trace_.dual_grad_norm.push_back(dn);
        if (oracle_.optimum) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double diff = x[i] - (*oracle_.optimum)[i];
                s += diff * diff;
            }
            trace_.dist_sq.push_back(s);
        }
        trace_.iterates.emplace_back(x.begin(), x.end());
        return {std::move(e), dn};
    }

    Trace& trace() { return trace_; }
    Trace finish() { return std::move(trace_); }

private:
    const Oracle& oracle_;
    Trace trace_;
};

inline void axpy(Vector& x, double a, std::span<const double> d) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * d[i];
}

} // namespace detail

/// x ← x − (1/L)·P(∇f). With the max norm this is norm-scaled signGD.
inline Trace run_steepest_descent(Oracle oracle, const NormKind& kind, double lipschitz,
                                  std::span<const double> x0, std::size_t steps) {
    detail::check_start(oracle, x0);
    if (!(lipschitz > 0.0)) throw InputError("steepest descent: L must be positive");
    detail::Recorder rec(oracle, kind);
    Vector x(x0.begin(), x0.end());
    for (std::size_t t = 0;; ++t) {
        const auto [eval, dn] = rec.observe(x);
        if (t == steps) break;
        detail::axpy(x, -1.0 / lipschitz, steepest_op(eval.gradient, kind));
    }
    return rec.finish();
}

/// x ← x − (α_t/L)·P(∇f)/‖∇f‖*. Stops at exact stationarity, where the direction is undefined.
inline Trace run_normalized_sd(Oracle oracle, const NormKind& kind, double lipschitz,
                               std::span<const double> x0, std::size_t steps,
                               StepSchedule schedule = StepSchedule::inv_sqrt()) {
    detail::check_start(oracle, x0);
    if (!(lipschitz > 0.0)) throw InputError("normalized steepest descent: L must be positive");
    detail::Recorder rec(oracle, kind);
    Vector x(x0.begin(), x0.end());
    for (std::size_t t = 0;; ++t) {
        const auto [eval, dn] = rec.observe(x);
        if (t == steps || dn <= kStationaryTol) break;
        detail::axpy(x, -schedule.at(t) / (lipschitz * dn), steepest_op(eval.gradient, kind));
    }
    return rec.finish();
}

/// Soft-normalized update x ← x − P(∇f)/(5L⁽⁰⁾ + 4L⁽¹⁾‖∇f‖*), run until
/// ‖∇f‖* ≤ eps (recorded as first_hit) or `steps` updates.
inline Trace run_relaxed_nsd(Oracle oracle, const NormKind& kind, double l0, double l1,
                             std::span<const double> x0, std::size_t steps, double eps) {
    detail::check_start(oracle, x0);
    if (!(l0 > 0.0) || !(l1 >= 0.0)) throw InputError("relaxed_nsd: need L0 > 0 and L1 >= 0");
    if (!(eps > 0.0)) throw InputError("relaxed_nsd: eps must be positive");
    detail::Recorder rec(oracle, kind);
    Vector x(x0.begin(), x0.end());
    for (std::size_t t = 0;; ++t) {
        const auto [eval, dn] = rec.observe(x);
        if (dn <= eps) {
            rec.trace().first_hit = t;
            break;
        }
        if (t == steps) break;
        detail::axpy(x, -1.0 / (5.0 * l0 + 4.0 * l1 * dn), steepest_op(eval.gradient, kind));
    }
    return rec.finish();
}

/// x ← x − α_t·sign(g_t), sign(0) = +1. Gradients are measured in ℓ1.
inline Trace run_signsgd(Oracle oracle, StepSchedule schedule, std::span<const double> x0, std::size_t steps) {
    detail::check_start(oracle, x0);
    if (!(schedule.alpha > 0.0)) throw InputError("signsgd: step size must be positive");
    detail::Recorder rec(oracle, MaxNorm{});
    Vector x(x0.begin(), x0.end());
    for (std::size_t t = 0;; ++t) {
        const auto [eval, dn] = rec.observe(x);
        if (t == steps) break;
        const double a = schedule.at(t);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= a * detail::sign(eval.gradient[i]);
    }
    return rec.finish();
}

/// γ = |m|/(√v + ε), so that γ⊙sign(m) = m/(√v + ε).
inline Vector adam_gamma(std::span<const double> m, std::span<const double> v, double epsilon) {
    if (m.size() != v.size()) throw InputError("adam_gamma: m and v differ in size");
    if (!(epsilon >= 0.0)) throw InputError("adam_gamma: epsilon must be non-negative");
    Vector g(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!(v[i] >= 0.0)) throw InputError("adam_gamma: v must be non-negative");
        const double denom = std::sqrt(v[i]) + epsilon;
        if (denom == 0.0) throw UndefinedError("adam_gamma: degenerate input, v = 0 with epsilon = 0");
        g[i] = std::abs(m[i]) / denom;
    }
    return g;
}

enum class AdamVariant { standard, shuffled, averaged, momentum_sign };

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double step = 1e-3;
    AdamVariant variant = AdamVariant::standard;
    std::optional<BlockPartition> blocks; ///< shuffle/average scope; whole vector when absent
};

/// What one Adam-family update applied: x_{t+1} = x_t − step·magnitudes⊙sign(m).
struct AdamStep {
    std::size_t t;
    Vector gamma;
    Vector sign_m;
    Vector magnitudes;
};

using AdamObserver = std::function<void(const AdamStep&)>;

/// m ← β₁m + (1−β₁)g, v ← β₂v + (1−β₂)g², from m₀ = v₀ = 0 and without bias
/// correction. The variant decides how γ = |m|/(√v+ε) is applied.
inline Trace run_adam_family(Oracle oracle, const AdamConfig& cfg, std::span<const double> x0,
                             std::size_t steps, std::mt19937_64& rng, const AdamObserver& observer = {}) {
    detail::check_start(oracle, x0);
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0))
        throw InputError("adam: betas must lie in [0, 1)");
    if (!(cfg.step > 0.0)) throw InputError("adam: step must be positive");
    const std::size_t d = x0.size();
    const BlockPartition scope = cfg.blocks ? *cfg.blocks : BlockPartition::whole(d);
    if (scope.dim() != d) throw InputError("adam: block partition dimension differs from x0");

    detail::Recorder rec(oracle, MaxNorm{});
    Vector x(x0.begin(), x0.end());
    Vector m(d, 0.0), v(d, 0.0);
    for (std::size_t t = 0;; ++t) {
        const auto [eval, dn] = rec.observe(x);
        if (t == steps) break;
        const Vector& g = eval.gradient;
        for (std::size_t i = 0; i < d; ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        }
        AdamStep info{t, adam_gamma(m, v, cfg.epsilon), Vector(d), Vector(d)};
        for (std::size_t i = 0; i < d; ++i) info.sign_m[i] = detail::sign(m[i]);

        switch (cfg.variant) {
        case AdamVariant::standard:
            info.magnitudes = info.gamma;
            break;
        case AdamVariant::momentum_sign:
            std::fill(info.magnitudes.begin(), info.magnitudes.end(), 1.0);
            break;
        case AdamVariant::shuffled:
            for (const auto& block : scope.blocks()) {
                std::vector<std::size_t> perm(block);
                std::shuffle(perm.begin(), perm.end(), rng);
                for (std::size_t k = 0; k < block.size(); ++k) info.magnitudes[block[k]] = info.gamma[perm[k]];
            }
            break;
        case AdamVariant::averaged:
            for (const auto& block : scope.blocks()) {
                double s = 0.0;
                for (std::size_t i : block) s += info.gamma[i];
                const double mean = s / static_cast<double>(block.size());
                for (std::size_t i : block) info.magnitudes[i] = mean;
            }
            break;
        }

        for (std::size_t i = 0; i < d; ++i) x[i] -= cfg.step * (info.magnitudes[i] * info.sign_m[i]);
        if (observer) observer(info);
    }
    return rec.finish();
}

/// Slack of each convergence guarantee along a steepest-descent trace,
/// relative to the bound's right-hand side; negative means violated.
struct RateCheck {
    bool geometry_matches = true;
    double smooth_slack = std::numeric_limits<double>::infinity();
    std::optional<double> pl_slack;
    std::optional<double> convex_slack;

    bool ok(double tol = 1e-9) const {
        return geometry_matches && smooth_slack >= -tol && (!pl_slack || *pl_slack >= -tol) &&
               (!convex_slack || *convex_slack >= -tol);
    }
};

namespace detail {

inline double relative_slack(double rhs, double lhs) {
    const double scale = std::abs(rhs);
    return scale > 0.0 ? (rhs - lhs) / scale : rhs - lhs;
}

} // namespace detail

/// Checks, at every horizon T the trace covers:
///   (1/T)Σ_{t<T}‖∇f_t‖*² ≤ 2L(f₀−f*)/T,
///   f_T − f* ≤ (1−μ/L)^T(f₀−f*)   when μ is given,
///   f_T − f* ≤ 2LR²/(T+4)          when R is given.
inline RateCheck verify_rate_bounds(const Trace& trace, double lipschitz, std::optional<double> mu, double f_star,
                                    std::optional<double> radius, const NormKind& kind) {
    RateCheck r;
    r.geometry_matches = trace.geometry == kind;
    if (mu) r.pl_slack = std::numeric_limits<double>::infinity();
    if (radius) r.convex_slack = std::numeric_limits<double>::infinity();
    if (trace.size() == 0) return r;

    const double gap0 = trace.f.front() - f_star;
    double sum_sq = 0.0;
    for (std::size_t T = 1; T < trace.size(); ++T) {
        const double g = trace.dual_grad_norm[T - 1];
        sum_sq += g * g;
        const double Td = static_cast<double>(T);
        r.smooth_slack = std::min(r.smooth_slack, detail::relative_slack(2.0 * lipschitz * gap0 / Td, sum_sq / Td));
        const double gap = trace.f[T] - f_star;
        if (mu) {
            const double rhs = std::pow(1.0 - *mu / lipschitz, Td) * gap0;
            r.pl_slack = std::min(*r.pl_slack, detail::relative_slack(rhs, gap));
        }
        if (radius) {
            const double rhs = 2.0 * lipschitz * *radius * *radius / (Td + 4.0);
            r.convex_slack = std::min(*r.convex_slack, detail::relative_slack(rhs, gap));
        }
    }
    return r;
}

} // namespace norm_descent
