#pragma once

// Geometry of a Hessian under the max norm: the exact ∞→1 matrix norm by
// enumeration of sign vectors, eigen-based upper/lower bounds, separable
// smoothness feasible points, and the block-diagonal analogues.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "norm_descent/errors.hpp"
#include "norm_descent/linalg.hpp"
#include "norm_descent/norms.hpp"

namespace norm_descent {

inline constexpr std::size_t kBruteForceMaxDim = 24;
inline constexpr double kPsdTol = 1e-10;

/// max over s ∈ {−1,1}^d of ‖Hs‖₁. Enumerates half the cube (‖Hs‖₁ = ‖H(−s)‖₁)
/// in Gray-code order so each step is an O(d) rank-one update of Hs.
inline double linf_bruteforce(const SymMatrix& h) {
    const std::size_t d = h.dim();
    if (d > kBruteForceMaxDim)
        throw InputError("dimension too large for exact norm: d = " + std::to_string(d) +
                         " exceeds " + std::to_string(kBruteForceMaxDim));

    const Matrix a = h.to_dense();
    Vector s(d, 1.0);
    Vector y = h * s;
    double best = detail::l1(y);

    const std::uint64_t count = std::uint64_t{1} << (d - 1);
    for (std::uint64_t k = 1; k < count; ++k) {
        const auto j = static_cast<std::size_t>(std::countr_zero(k));
        s[j] = -s[j];
        if ((k & 0xFFF) == 0) {
            // resync to bound drift from the incremental updates
            y = h * s;
        } else {
            const double step = 2.0 * s[j];
            for (std::size_t i = 0; i < d; ++i) y[i] += step * a(i, j);
        }
        best = std::max(best, detail::l1(y));
    }
    return best;
}

/// Σ|Hᵢᵢ| / Σ|Hᵢⱼ|. Lies in [1/d, 1] for PSD input.
inline double rho_diag(const SymMatrix& h) {
    double diag = 0.0, total = 0.0;
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = 0; j < h.dim(); ++j) {
            total += std::abs(h(i, j));
            if (i == j) diag += std::abs(h(i, j));
        }
    if (total == 0.0) throw UndefinedError("rho_diag undefined for the zero matrix");
    return diag / total;
}

struct LinfBounds {
    std::optional<double> bound_psd; ///< ρ_diag⁻¹·Σλᵢ, only for PSD input
    double bound_sym;                ///< Σ|λᵢ|·‖vᵢ‖₁²
    double lower_bound;              ///< maxᵢ |λᵢ|·‖vᵢ‖₁/‖vᵢ‖∞
};

inline LinfBounds linf_bounds(const SymMatrix& h) {
    const auto eig = eigh(h);
    LinfBounds out{std::nullopt, 0.0, 0.0};
    double sum_lambda = 0.0;
    for (std::size_t k = 0; k < h.dim(); ++k) {
        const Vector v = eig.column(k);
        const double lam = eig.values[k];
        const double n1 = detail::l1(v);
        out.bound_sym += std::abs(lam) * n1 * n1;
        out.lower_bound = std::max(out.lower_bound, std::abs(lam) * n1 / detail::linf(v));
        sum_lambda += lam;
    }
    if (eig.values.front() >= -kPsdTol && h.max_abs() > 0.0) out.bound_psd = sum_lambda / rho_diag(h);
    return out;
}

struct SeparableBound {
    Vector l;     ///< lᵢ = Σⱼ|Hᵢⱼ|
    double total; ///< Σlᵢ
};

/// Row-sum feasible point for separable smoothness: diag(l) − H is diagonally dominant, hence PSD.
inline SeparableBound lsep_rowsum(const SymMatrix& h) {
    SeparableBound out{Vector(h.dim(), 0.0), 0.0};
    for (std::size_t i = 0; i < h.dim(); ++i) {
        for (std::size_t j = 0; j < h.dim(); ++j) out.l[i] += std::abs(h(i, j));
        out.total += out.l[i];
    }
    return out;
}

/// a + d + 2|b| for a positive-definite [[a,b],[b,d]].
inline double lsep_exact_2x2(const SymMatrix& h) {
    if (h.dim() != 2) throw InputError("lsep_exact_2x2 requires a 2x2 matrix");
    const double a = h(0, 0), b = h(0, 1), d = h(1, 1);
    if (!(a > 0.0 && a * d - b * b > 0.0)) throw InputError("lsep_exact_2x2 requires positive definite input");
    return a + d + 2.0 * std::abs(b);
}

namespace detail {

inline Matrix block_of(const SymMatrix& h, const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& cols) {
    Matrix m(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) m(a, b) = h(rows[a], cols[b]);
    return m;
}

// spectral norms ‖H_BB′‖₂ for every ordered pair of blocks
inline Matrix block_spectral_norms(const SymMatrix& h, const BlockPartition& p) {
    const std::size_t nb = p.size();
    Matrix norms(nb, nb);
    for (std::size_t a = 0; a < nb; ++a) {
        norms(a, a) = spectral_norm(h.principal(p[a]));
        for (std::size_t b = a + 1; b < nb; ++b)
            norms(a, b) = norms(b, a) = spectral_norm(block_of(h, p[a], p[b]));
    }
    return norms;
}

} // namespace detail

/// Σ over block pairs of ‖H_BB′‖₂; an upper bound on max_{‖x‖^B_∞≤1} ‖Hx‖^B₁ for any symmetric H.
inline double block_norm_upper(const SymMatrix& h, const BlockPartition& p) {
    if (p.dim() != h.dim()) throw InputError("block partition dimension differs from the matrix");
    const Matrix norms = detail::block_spectral_norms(h, p);
    double s = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = 0; b < p.size(); ++b) s += norms(a, b);
    return s;
}

struct BlockReport {
    double rho_block;
    double bound;
    double sampled_lower;
    Vector block_lambda_max;
};

inline BlockReport block_analysis(const SymMatrix& h, const BlockPartition& p, std::size_t samples,
                                  std::mt19937_64& rng) {
    if (p.dim() != h.dim()) throw InputError("block partition dimension differs from the matrix");
    if (samples == 0) throw InputError("block_analysis: need at least one sample");
    if (!is_psd(h, kPsdTol)) throw InputError("block_analysis requires a positive semi-definite matrix");

    const Matrix norms = detail::block_spectral_norms(h, p);
    BlockReport out{0.0, 0.0, 0.0, Vector(p.size())};
    double diag = 0.0, total = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        out.block_lambda_max[a] = eigh(h.principal(p[a])).values.back();
        diag += norms(a, a);
        for (std::size_t b = 0; b < p.size(); ++b) total += norms(a, b);
    }
    if (total == 0.0) throw UndefinedError("block_analysis undefined for the zero matrix");
    out.rho_block = diag / total;
    double sum_lambda = 0.0;
    for (double l : out.block_lambda_max) sum_lambda += l;
    out.bound = sum_lambda / out.rho_block;

    // the maximum of a convex function over a product of balls sits on the product of spheres
    std::normal_distribution<double> normal(0.0, 1.0);
    const BlockMax geometry{p};
    Vector x(h.dim());
    for (std::size_t n = 0; n < samples; ++n) {
        for (double& v : x) v = normal(rng);
        for (const auto& block : p.blocks()) {
            const double bn = detail::block_l2(x, block);
            if (bn == 0.0) continue;
            for (std::size_t i : block) x[i] /= bn;
        }
        out.sampled_lower = std::max(out.sampled_lower, dual_norm(h * x, geometry));
    }
    return out;
}

/// Relative progress of norm-scaled signGD over GD at a point: φ(g)·d·L₂/L∞.
inline double improvement_ratio(double l2, double linf, std::span<const double> grad) {
    if (!(l2 > 0.0) || !(linf > 0.0)) throw InputError("improvement_ratio: smoothness constants must be positive");
    return gradient_density(grad) * static_cast<double>(grad.size()) * l2 / linf;
}

/// Smoothness constant of x ↦ ½xᵀHx w.r.t. the given norm, i.e. the induced
/// norm max_{‖x‖≤1} ‖Hx‖*. Exact for every kind except BlockMax, which gets
/// the pairwise block spectral-norm upper bound.
inline double smoothness_constant(const SymMatrix& h, const NormKind& kind) {
    return std::visit(
        detail::overloaded{
            [&](const Euclidean&) { return spectral_norm(h); },
            [&](const MaxNorm&) { return linf_bruteforce(h); },
            [&](const OneNorm&) { return h.max_abs(); },
            [&](const WeightedDiag& w) {
                if (w.weights.size() != h.dim()) throw InputError("weights dimension differs from the matrix");
                SymMatrix scaled(h.dim());
                for (std::size_t i = 0; i < h.dim(); ++i)
                    for (std::size_t j = i; j < h.dim(); ++j)
                        scaled.set(i, j, h(i, j) / std::sqrt(w.weights[i] * w.weights[j]));
                return spectral_norm(scaled);
            },
            [&](const BlockMax& b) { return block_norm_upper(h, b.partition); }},
        kind);
}

struct SmoothnessReport {
    double L2 = 0.0;
    std::optional<double> Linf_exact;
    double rho_diag = 0.0;
    std::optional<double> bound_psd;
    double bound_sym = 0.0;
    double lower_bound = 0.0;
    double lsep_rowsum = 0.0;
    std::optional<double> lsep_exact_2x2;
    std::optional<double> ratio_dL2_over_Linf;
};

inline SmoothnessReport analyze(const SymMatrix& h) {
    SmoothnessReport r;
    r.L2 = spectral_norm(h);
    r.rho_diag = rho_diag(h);
    const auto bounds = linf_bounds(h);
    r.bound_psd = bounds.bound_psd;
    r.bound_sym = bounds.bound_sym;
    r.lower_bound = bounds.lower_bound;
    r.lsep_rowsum = lsep_rowsum(h).total;
    if (h.dim() <= kBruteForceMaxDim) {
        r.Linf_exact = linf_bruteforce(h);
        if (*r.Linf_exact > 0.0)
            r.ratio_dL2_over_Linf = static_cast<double>(h.dim()) * r.L2 / *r.Linf_exact;
    }
    if (h.dim() == 2) {
        const double a = h(0, 0), b = h(0, 1), d = h(1, 1);
        if (a > 0.0 && a * d - b * b > 0.0) r.lsep_exact_2x2 = lsep_exact_2x2(h);
    }
    return r;
}

} // namespace norm_descent
