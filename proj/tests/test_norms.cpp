#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "norm_descent/norms.hpp"
#include "test_support.hpp"

namespace nd = norm_descent;

namespace {

std::vector<nd::NormKind> all_kinds(std::size_t d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> w(0.2, 5.0);
    nd::Vector weights(d);
    for (double& v : weights) v = w(rng);
    std::vector<std::size_t> sizes{d / 2, d - d / 2};
    return {nd::Euclidean{}, nd::MaxNorm{}, nd::OneNorm{}, nd::WeightedDiag(weights),
            nd::BlockMax{nd::BlockPartition::contiguous(sizes)}};
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace

TEST(Norm, Examples) {
    EXPECT_DOUBLE_EQ(nd::norm(nd::Vector{3, -4}, nd::Euclidean{}), 5.0);
    EXPECT_DOUBLE_EQ(nd::norm(nd::Vector{1, -2, 0}, nd::MaxNorm{}), 2.0);
    EXPECT_DOUBLE_EQ(nd::norm(nd::Vector{1, -2, 0}, nd::OneNorm{}), 3.0);
    EXPECT_DOUBLE_EQ(nd::norm(nd::Vector{2, 2}, nd::WeightedDiag({1, 4})), std::sqrt(20.0));
    const nd::BlockMax blocks{nd::BlockPartition({{0, 2}, {1}}, 3)};
    EXPECT_DOUBLE_EQ(nd::norm(nd::Vector{3, -1, 4}, blocks), 5.0);
}

TEST(DualNorm, Examples) {
    EXPECT_DOUBLE_EQ(nd::dual_norm(nd::Vector{1, -2}, nd::MaxNorm{}), 3.0);
    EXPECT_DOUBLE_EQ(nd::dual_norm(nd::Vector{3, 4}, nd::Euclidean{}), 5.0);
    EXPECT_DOUBLE_EQ(nd::dual_norm(nd::Vector{1, -2}, nd::OneNorm{}), 2.0);
    EXPECT_DOUBLE_EQ(nd::dual_norm(nd::Vector{2, 2}, nd::WeightedDiag({1, 4})), std::sqrt(5.0));
    const nd::BlockMax blocks{nd::BlockPartition({{0, 2}, {1}}, 3)};
    EXPECT_DOUBLE_EQ(nd::dual_norm(nd::Vector{3, -1, 4}, blocks), 6.0);
}

TEST(DualNorm, HolderInequalityAndAttainment) {
    std::mt19937_64 rng(21);
    for (const auto& kind : all_kinds(7, rng)) {
        for (int i = 0; i < 1000; ++i) {
            const auto x = nd::testing::random_vector(7, rng);
            const auto z = nd::testing::random_vector(7, rng);
            EXPECT_LE(nd::dot(x, z), nd::norm(x, kind) * nd::dual_norm(z, kind) + 1e-12);
        }
        // the steepest direction, rescaled to the unit sphere, attains the dual norm
        for (int i = 0; i < 50; ++i) {
            const auto z = nd::testing::random_vector(7, rng);
            auto p = nd::steepest_op(z, kind);
            const double pn = nd::norm(p, kind);
            for (double& v : p) v /= pn;
            EXPECT_LE(relative_gap(nd::dot(z, p), nd::dual_norm(z, kind)), 1e-12) << nd::norm_name(kind);
        }
    }
}

TEST(SteepestOp, Examples) {
    EXPECT_EQ(nd::steepest_op(nd::Vector{1, -2}, nd::MaxNorm{}), (nd::Vector{3, -3}));
    EXPECT_EQ(nd::steepest_op(nd::Vector{1, -2}, nd::OneNorm{}), (nd::Vector{0, -2}));
    EXPECT_EQ(nd::steepest_op(nd::Vector{1, -2}, nd::Euclidean{}), (nd::Vector{1, -2}));
    EXPECT_EQ(nd::steepest_op(nd::Vector{2, 8}, nd::WeightedDiag({2, 4})), (nd::Vector{1, 2}));

    std::mt19937_64 rng(1);
    for (const auto& kind : all_kinds(4, rng)) EXPECT_EQ(nd::steepest_op(nd::Vector(4, 0.0), kind), nd::Vector(4, 0.0));
}

TEST(SteepestOp, Conventions) {
    // sign(0) = +1
    EXPECT_EQ(nd::steepest_op(nd::Vector{0, -1}, nd::MaxNorm{}), (nd::Vector{1, -1}));
    // smallest index wins coordinate ties
    EXPECT_EQ(nd::steepest_op(nd::Vector{2, -2, 1}, nd::OneNorm{}), (nd::Vector{2, 0, 0}));
    // a zero block stays zero
    const nd::BlockMax blocks{nd::BlockPartition({{0, 1}, {2}}, 3)};
    EXPECT_EQ(nd::steepest_op(nd::Vector{3, 4, 0}, blocks), (nd::Vector{3, 4, 0}));
}

TEST(SteepestOp, DualIdentities) {
    std::mt19937_64 rng(33);
    for (const auto& kind : all_kinds(9, rng)) {
        for (int i = 0; i < 1000; ++i) {
            const auto z = nd::testing::random_vector(9, rng, 3.0);
            const auto p = nd::steepest_op(z, kind);
            const double pn = nd::norm(p, kind);
            const double dn = nd::dual_norm(z, kind);
            EXPECT_LE(std::abs(pn * pn - nd::dot(z, p)) / (pn * pn), 1e-10) << nd::norm_name(kind);
            EXPECT_LE(std::abs(pn - dn) / dn, 1e-10) << nd::norm_name(kind);
        }
    }
}

TEST(SteepestOp, MaximizesTheLocalModel) {
    std::mt19937_64 rng(34);
    auto model = [](const nd::Vector& z, const nd::Vector& x, const nd::NormKind& kind) {
        const double n = nd::norm(x, kind);
        return nd::dot(z, x) - 0.5 * n * n;
    };
    for (const auto& kind : all_kinds(6, rng)) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto z = nd::testing::random_vector(6, rng);
            const auto p = nd::steepest_op(z, kind);
            const double best = model(z, p, kind);
            for (int i = 0; i < 100; ++i) {
                auto x = p;
                const auto delta = nd::testing::random_vector(6, rng, i < 50 ? 1e-3 : 1.0);
                for (std::size_t k = 0; k < 6; ++k) x[k] += delta[k];
                EXPECT_LE(model(z, x, kind), best + 1e-10) << nd::norm_name(kind);
            }
        }
    }
}

TEST(Norm, VectorNormSandwich) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 500; ++i) {
        const std::size_t d = 1 + static_cast<std::size_t>(i % 12);
        const auto z = nd::testing::random_vector(d, rng);
        const double linf = nd::norm(z, nd::MaxNorm{});
        const double l2 = nd::norm(z, nd::Euclidean{});
        const double l1 = nd::norm(z, nd::OneNorm{});
        const double sd = std::sqrt(static_cast<double>(d));
        EXPECT_LE(linf, l2 * (1 + 1e-15));
        EXPECT_LE(l2, l1 * (1 + 1e-15));
        EXPECT_LE(l1, sd * l2 * (1 + 1e-14));
        EXPECT_LE(sd * l2, static_cast<double>(d) * linf * (1 + 1e-14));
    }
}

TEST(BlockMax, SingletonBlocksReduceToMaxNorm) {
    std::mt19937_64 rng(8);
    const nd::BlockMax singles{nd::BlockPartition::singletons(5)};
    for (int i = 0; i < 200; ++i) {
        const auto z = nd::testing::random_vector(5, rng);
        EXPECT_NEAR(nd::norm(z, singles), nd::norm(z, nd::MaxNorm{}), 1e-12);
        EXPECT_NEAR(nd::dual_norm(z, singles), nd::dual_norm(z, nd::MaxNorm{}), 1e-12);
        EXPECT_LE(nd::testing::max_abs_diff(nd::steepest_op(z, singles), nd::steepest_op(z, nd::MaxNorm{})),
                  1e-12 * nd::dual_norm(z, singles));
    }
}

TEST(GradientDensity, Examples) {
    EXPECT_DOUBLE_EQ(nd::gradient_density(nd::Vector{1, 1, 1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(nd::gradient_density(nd::Vector{1, 0, 0, 0}), 0.25);
    EXPECT_DOUBLE_EQ(nd::gradient_density(nd::Vector{3, 4}), 0.98);
    EXPECT_THROW(nd::gradient_density(nd::Vector{0, 0}), nd::UndefinedError);
}

TEST(GradientDensity, ScaleInvariantAndBounded) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> c(-100.0, 100.0);
    for (int i = 0; i < 500; ++i) {
        const std::size_t d = 1 + static_cast<std::size_t>(i % 10);
        auto z = nd::testing::random_vector(d, rng);
        const double phi = nd::gradient_density(z);
        EXPECT_GE(phi, 1.0 / static_cast<double>(d) - 1e-15);
        EXPECT_LE(phi, 1.0 + 1e-15);
        const double s = c(rng);
        for (double& v : z) v *= s;
        EXPECT_NEAR(nd::gradient_density(z), phi, 1e-13);
    }
}

TEST(NormKind, ValidatesDimensionsAndParameters) {
    EXPECT_THROW(nd::norm(nd::Vector{1, 2, 3}, nd::WeightedDiag({1, 1})), nd::InputError);
    EXPECT_THROW(nd::dual_norm(nd::Vector{1, 2}, nd::BlockMax{nd::BlockPartition::singletons(3)}), nd::InputError);
    EXPECT_THROW(nd::WeightedDiag({1.0, 0.0}), nd::InputError);
    EXPECT_THROW(nd::BlockPartition({{0}, {0, 1}}, 2), nd::InputError);
    EXPECT_THROW(nd::BlockPartition({{0}}, 2), nd::InputError);
    EXPECT_THROW(nd::BlockPartition({{0, 1}, {}}, 2), nd::InputError);
    EXPECT_THROW(nd::BlockPartition({{0, 2}}, 2), nd::InputError);
}
