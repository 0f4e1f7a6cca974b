#pragma once

// Norms, their duals, and the steepest-descent operator
//
//     P(z) = argmax_x ⟨z, x⟩ − ½‖x‖²,
//
// which satisfies ‖P(z)‖ = ‖z‖* and ⟨z, P(z)⟩ = ‖z‖*². Every optimizer in the
// library is "x ← x − step·P(∇f)" for some norm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "norm_descent/errors.hpp"
#include "norm_descent/linalg.hpp"

namespace norm_descent {

/// Disjoint, non-empty index sets covering {0, …, d−1}.
class BlockPartition {
public:
    BlockPartition(std::vector<std::vector<std::size_t>> blocks, std::size_t dim)
        : blocks_(std::move(blocks)), dim_(dim) {
        std::vector<bool> seen(dim, false);
        std::size_t covered = 0;
        for (const auto& b : blocks_) {
            if (b.empty()) throw InputError("BlockPartition: empty block");
            for (std::size_t i : b) {
                if (i >= dim) throw InputError("BlockPartition: index " + std::to_string(i) + " out of range");
                if (seen[i]) throw InputError("BlockPartition: index " + std::to_string(i) + " appears twice");
                seen[i] = true;
                ++covered;
            }
        }
        if (covered != dim) throw InputError("BlockPartition: blocks do not cover every coordinate");
    }

    static BlockPartition singletons(std::size_t dim) {
        std::vector<std::vector<std::size_t>> b(dim);
        for (std::size_t i = 0; i < dim; ++i) b[i] = {i};
        return BlockPartition(std::move(b), dim);
    }

    static BlockPartition whole(std::size_t dim) {
        std::vector<std::size_t> all(dim);
        for (std::size_t i = 0; i < dim; ++i) all[i] = i;
        return BlockPartition({std::move(all)}, dim);
    }

    /// Consecutive blocks of the given sizes.
    static BlockPartition contiguous(std::span<const std::size_t> sizes) {
        std::vector<std::vector<std::size_t>> b;
        std::size_t next = 0;
        for (std::size_t s : sizes) {
            std::vector<std::size_t> block(s);
            for (auto& i : block) i = next++;
            b.push_back(std::move(block));
        }
        return BlockPartition(std::move(b), next);
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return blocks_.size(); }
    const std::vector<std::size_t>& operator[](std::size_t k) const { return blocks_[k]; }
    const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }

    friend bool operator==(const BlockPartition&, const BlockPartition&) = default;

private:
    std::vector<std::vector<std::size_t>> blocks_;
    std::size_t dim_;
};

struct Euclidean {
    friend bool operator==(const Euclidean&, const Euclidean&) = default;
};
struct MaxNorm {
    friend bool operator==(const MaxNorm&, const MaxNorm&) = default;
};
struct OneNorm {
    friend bool operator==(const OneNorm&, const OneNorm&) = default;
};

/// ‖x‖_l = √Σ lᵢxᵢ² with strictly positive weights.
struct WeightedDiag {
    explicit WeightedDiag(Vector w) : weights(std::move(w)) {
        if (weights.empty()) throw InputError("WeightedDiag: no weights");
        for (double l : weights)
            if (!(l > 0.0) || !std::isfinite(l)) throw InputError("WeightedDiag: weights must be positive");
    }
    Vector weights;
    friend bool operator==(const WeightedDiag&, const WeightedDiag&) = default;
};

/// max over blocks of the block's Euclidean norm.
struct BlockMax {
    BlockPartition partition;
    friend bool operator==(const BlockMax&, const BlockMax&) = default;
};

using NormKind = std::variant<Euclidean, MaxNorm, OneNorm, WeightedDiag, BlockMax>;

inline std::string norm_name(const NormKind& kind) {
    static constexpr const char* names[] = {"euclidean", "max", "one", "weighted", "blockmax"};
    return names[kind.index()];
}

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline double sign(double v) { return v >= 0.0 ? 1.0 : -1.0; }

inline double l2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double l1(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

inline double linf(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double block_l2(std::span<const double> x, const std::vector<std::size_t>& block) {
    double s = 0.0;
    for (std::size_t i : block) s += x[i] * x[i];
    return std::sqrt(s);
}

inline void check_dim(std::span<const double> x, const NormKind& kind) {
    const std::size_t expected = std::visit(
        overloaded{[&](const WeightedDiag& w) { return w.weights.size(); },
                   [&](const BlockMax& b) { return b.partition.dim(); },
                   [&](const auto&) { return x.size(); }},
        kind);
    if (expected != x.size())
        throw InputError("norm: vector has dimension " + std::to_string(x.size()) + " but the " +
                         norm_name(kind) + " norm expects " + std::to_string(expected));
}

} // namespace detail

inline double norm(std::span<const double> x, const NormKind& kind) {
    detail::check_dim(x, kind);
    return std::visit(
        detail::overloaded{
            [&](const Euclidean&) { return detail::l2(x); },
            [&](const MaxNorm&) { return detail::linf(x); },
            [&](const OneNorm&) { return detail::l1(x); },
            [&](const WeightedDiag& w) {
                double s = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) s += w.weights[i] * x[i] * x[i];
                return std::sqrt(s);
            },
            [&](const BlockMax& b) {
                double m = 0.0;
                for (const auto& block : b.partition.blocks()) m = std::max(m, detail::block_l2(x, block));
                return m;
            }},
        kind);
}

inline double dual_norm(std::span<const double> z, const NormKind& kind) {
    detail::check_dim(z, kind);
    return std::visit(
        detail::overloaded{
            [&](const Euclidean&) { return detail::l2(z); },
            [&](const MaxNorm&) { return detail::l1(z); },
            [&](const OneNorm&) { return detail::linf(z); },
            [&](const WeightedDiag& w) {
                double s = 0.0;
                for (std::size_t i = 0; i < z.size(); ++i) s += z[i] * z[i] / w.weights[i];
                return std::sqrt(s);
            },
            [&](const BlockMax& b) {
                double s = 0.0;
                for (const auto& block : b.partition.blocks()) s += detail::block_l2(z, block);
                return s;
            }},
        kind);
}

/// Steepest-descent direction P(z). sign(0) is taken as +1 and coordinate
/// ties resolve to the smallest index; zero blocks stay zero.
inline Vector steepest_op(std::span<const double> z, const NormKind& kind) {
    detail::check_dim(z, kind);
    const std::size_t d = z.size();
    Vector p(d, 0.0);
    if (std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; })) return p;

    std::visit(
        detail::overloaded{
            [&](const Euclidean&) { p.assign(z.begin(), z.end()); },
            [&](const MaxNorm&) {
                const double scale = detail::l1(z);
                for (std::size_t i = 0; i < d; ++i) p[i] = scale * detail::sign(z[i]);
            },
            [&](const OneNorm&) {
                std::size_t imax = 0;
                for (std::size_t i = 1; i < d; ++i)
                    if (std::abs(z[i]) > std::abs(z[imax])) imax = i;
                p[imax] = z[imax];
            },
            [&](const WeightedDiag& w) {
                for (std::size_t i = 0; i < d; ++i) p[i] = z[i] / w.weights[i];
            },
            [&](const BlockMax& b) {
                const double scale = dual_norm(z, kind);
                for (const auto& block : b.partition.blocks()) {
                    const double bn = detail::block_l2(z, block);
                    if (bn == 0.0) continue;
                    for (std::size_t i : block) p[i] = scale * z[i] / bn;
                }
            }},
        kind);
    return p;
}

/// φ(z) = ‖z‖₁² / (d‖z‖₂²), in [1/d, 1].
inline double gradient_density(std::span<const double> z) {
    const double l2 = detail::l2(z);
    if (z.empty() || l2 == 0.0) throw UndefinedError("gradient density undefined for the zero vector");
    const double l1 = detail::l1(z);
    // ratio first so squares of large gradients do not overflow
    const double r = l1 / l2;
    return r * r / static_cast<double>(z.size());
}

} // namespace norm_descent
