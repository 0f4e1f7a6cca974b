#pragma once

// Differentiable test problems with known optimum f* = 0 at x* = 0:
// rotated quadratics ½xᵀHx and the relaxed-smooth Σcosh(xᵢ) − d.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "norm_descent/errors.hpp"
#include "norm_descent/hessian_analysis.hpp"
#include "norm_descent/linalg.hpp"

namespace norm_descent {

struct Evaluation {
    double value;
    Vector gradient;
};

/// Engine for the `index`-th draw of a seeded stream. Distinct (seed, index)
/// pairs give independent-looking streams; equal pairs give identical ones.
inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

inline Vector standard_normal(std::size_t d, std::uint64_t seed, std::uint64_t index) {
    auto rng = seeded_engine(seed, index);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector x(d);
    for (double& v : x) v = normal(rng);
    return x;
}

class QuadraticProblem {
public:
    explicit QuadraticProblem(SymMatrix h) : h_(std::move(h)) {
        const auto eig = eigh(h_);
        if (eig.values.front() < -kPsdTol) throw InputError("QuadraticProblem: Hessian is not positive semi-definite");
        lambda_min_ = eig.values.front();
        analysis_ = analyze(h_);
    }

    std::size_t dim() const noexcept { return h_.dim(); }
    const SymMatrix& hessian() const noexcept { return h_; }
    const SmoothnessReport& analysis() const noexcept { return analysis_; }
    double lambda_min() const noexcept { return lambda_min_; }

private:
    SymMatrix h_;
    SmoothnessReport analysis_;
    double lambda_min_ = 0.0;
};

/// Spectrum (1, …, 1, λ_max) rotated by exp(θ·S) for a seeded Gaussian skew S.
inline QuadraticProblem make_quadratic(std::size_t d, double lambda_max, double theta, std::uint64_t seed) {
    if (d < 2) throw InputError("make_quadratic: dimension must be at least 2");
    if (!(lambda_max >= 1.0) || !std::isfinite(lambda_max)) throw InputError("make_quadratic: lambda_max must be >= 1");
    if (!(theta >= 0.0 && theta <= 1.0)) throw InputError("make_quadratic: theta must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    const SkewMatrix s = random_skew(d, rng);
    Vector eigs(d, 1.0);
    eigs.back() = lambda_max;
    return QuadraticProblem(rotated_hessian(eigs, s, theta));
}

inline Evaluation quad_eval(const QuadraticProblem& p, std::span<const double> x) {
    if (x.size() != p.dim()) throw InputError("quad_eval: dimension mismatch");
    Vector g = p.hessian() * x;
    return {0.5 * dot(x, g), std::move(g)};
}

/// Per-run Gaussian noise source; draw k is a pure function of (seed, k).
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t calls = 0;
};

inline Vector noisy_grad(const QuadraticProblem& p, std::span<const double> x, double sigma, NoiseStream& stream) {
    if (!(sigma >= 0.0)) throw InputError("noisy_grad: sigma must be non-negative");
    Vector g = p.hessian() * x;
    const std::uint64_t index = stream.calls++;
    if (sigma == 0.0) return g;
    const Vector xi = standard_normal(p.dim(), stream.seed, index);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += sigma * xi[i];
    return g;
}

/// f(x) = Σ cosh(xᵢ) − d. (d, 1)-relaxed-smooth w.r.t. the max norm since
/// cosh t ≤ 1 + |sinh t|.
class CoshProblem {
public:
    explicit CoshProblem(std::size_t dim) : dim_(dim) {
        if (dim == 0) throw InputError("CoshProblem: dimension must be positive");
    }
    std::size_t dim() const noexcept { return dim_; }

private:
    std::size_t dim_;
};

inline constexpr double kCoshDomain = 700.0;

inline Evaluation cosh_eval(const CoshProblem& p, std::span<const double> x) {
    if (x.size() != p.dim()) throw InputError("cosh_eval: dimension mismatch");
    Evaluation e{0.0, Vector(x.size())};
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(std::abs(x[i]) <= kCoshDomain)) throw InputError("cosh_eval: |x_i| exceeds the overflow guard");
        e.value += std::cosh(x[i]) - 1.0;
        e.gradient[i] = std::sinh(x[i]);
    }
    return e;
}

/// Type-erased first-order oracle consumed by the optimizers. `evaluate` may
/// carry a private noise stream, in which case the oracle is not pure.
struct Oracle {
    std::size_t dim = 0;
    std::function<Evaluation(std::span<const double>)> evaluate;
    std::optional<Vector> optimum;
    double f_star = 0.0;
    bool stochastic = false;
};

/// Exact-gradient oracle for sigma = 0, otherwise exact f with gradient Hx + σξ.
inline Oracle make_oracle(const QuadraticProblem& p, double sigma = 0.0, std::uint64_t noise_seed = 0) {
    auto shared = std::make_shared<const QuadraticProblem>(p);
    Oracle o;
    o.dim = p.dim();
    o.optimum = Vector(p.dim(), 0.0);
    o.f_star = 0.0;
    o.stochastic = sigma > 0.0;
    if (sigma == 0.0) {
        o.evaluate = [shared](std::span<const double> x) { return quad_eval(*shared, x); };
    } else {
        o.evaluate = [shared, sigma, stream = NoiseStream{noise_seed, 0}](std::span<const double> x) mutable {
            Evaluation e = quad_eval(*shared, x);
            e.gradient = noisy_grad(*shared, x, sigma, stream);
            return e;
        };
    }
    return o;
}

inline Oracle make_oracle(const CoshProblem& p) {
    Oracle o;
    o.dim = p.dim();
    o.optimum = Vector(p.dim(), 0.0);
    o.evaluate = [p](std::span<const double> x) { return cosh_eval(p, x); };
    return o;
}

} // namespace norm_descent
