#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cascade/blockage.hpp"
#include "oracles.hpp"

using namespace cascade;

namespace {

ModelParams make(Variant v, double p, int N, double K = 0.1) {
    ModelParams m;
    m.variant = v;
    m.p = p;
    m.K = K;
    m.stages = N;
    return m;
}

// Walks circle by circle and tests the ray against each arc interval
// explicitly instead of using the arc-index arithmetic.
int walk_arcs(const BlockageTree& tree, double R, Polar x) {
    int count = 0;
    for (int n = 1; n <= tree.stage_count(); ++n) {
        if (!(R * std::sqrt(std::pow(2.0, n) - 1.0) < x.r)) break;
        const auto bits = tree.stage_bits(n);
        const double width = kTwoPi / static_cast<double>(bits.size());
        for (std::size_t a = 0; a < bits.size(); ++a) {
            if (x.phi >= width * static_cast<double>(a) && x.phi < width * static_cast<double>(a + 1)) {
                count += bits[a];
                break;
            }
        }
    }
    return count;
}

}  // namespace

TEST(SampleTree, FullyBlocked) {
    Rng rng(1);
    const auto tree = sample_tree(make(Variant::basic, 1.0, 3), rng);
    ASSERT_TRUE(tree);
    for (int n = 1; n <= 3; ++n) {
        EXPECT_EQ(tree->stage_bits(n).size(), std::size_t{1} << n);
        for (auto b : tree->stage_bits(n)) EXPECT_EQ(b, 1);
    }
}

TEST(SampleTree, BitMeanMatchesP) {
    Rng rng(7);
    const auto params = make(Variant::basic, 0.5, 3);
    long long ones = 0, total = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto tree = sample_tree(params, rng);
        for (int n = 1; n <= 3; ++n)
            for (auto b : tree->stage_bits(n)) {
                ones += b;
                ++total;
            }
    }
    const double mean = static_cast<double>(ones) / static_cast<double>(total);
    const double sigma = std::sqrt(0.25 / static_cast<double>(total));
    EXPECT_NEAR(mean, 0.5, 3.0 * sigma);
}

TEST(SampleTree, SiblingBitsIndependent) {
    // 2x2 contingency table of the two stage-1 arcs; chi-square, 1 dof, 1% level.
    Rng rng(11);
    const auto params = make(Variant::basic, 0.3, 2);
    double table[2][2] = {{0, 0}, {0, 0}};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto tree = sample_tree(params, rng);
        table[tree->stage_bits(1)[0]][tree->stage_bits(1)[1]] += 1.0;
    }
    double chi2 = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double row = table[a][0] + table[a][1];
            const double col = table[0][b] + table[1][b];
            const double expected = row * col / n;
            chi2 += (table[a][b] - expected) * (table[a][b] - expected) / expected;
        }
    EXPECT_LT(chi2, 6.635);
}

TEST(SampleTree, PeriodicPairsHaveOneBlockedArc) {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto tree = sample_tree(make(Variant::periodic, 0.5, 5), rng);
        for (int n = 1; n <= 5; ++n) {
            const auto bits = tree->stage_bits(n);
            for (std::size_t a = 0; a < bits.size(); a += 2) EXPECT_EQ(bits[a] + bits[a + 1], 1);
        }
    }
}

TEST(SampleTree, HalfArcLayout) {
    Rng rng(3);
    const auto tree = sample_tree(make(Variant::less_correlated, 0.5, 4), rng);
    for (int n = 1; n <= 4; ++n) EXPECT_EQ(tree->stage_bits(n).size(), std::size_t{2} << n);
}

TEST(SampleTree, IndependentHasNoTreeAndInfiniteIsRejected) {
    Rng rng(3);
    EXPECT_FALSE(sample_tree(make(Variant::independent, 0.5, 4), rng).has_value());
    auto inf = make(Variant::basic, 0.9, 4);
    inf.stages.reset();
    EXPECT_THROW(sample_tree(inf, rng), ConfigError);
}

TEST(BlockageTree, RejectsMalformedBits) {
    const CascadeGeometry g(1.0, 2);
    EXPECT_THROW(BlockageTree(Variant::basic, g, {{1, 0}, {1, 0, 1}}), ConfigError);
    EXPECT_THROW(BlockageTree(Variant::periodic, g, {{1, 1}, {1, 0, 0, 1}}), ConfigError);
    EXPECT_NO_THROW(BlockageTree(Variant::periodic, g, {{0, 1}, {1, 0, 0, 1}}));
}

TEST(BlockageTree, Dump) {
    const BlockageTree tree(Variant::basic, CascadeGeometry(1.0, 2), {{1, 0}, {0, 1, 1, 0}});
    EXPECT_EQ(tree.dump(), "10\n0110\n");
}

TEST(BlockageCount, Examples) {
    Rng rng(1);
    const auto blocked = sample_tree(make(Variant::basic, 1.0, 5), rng);
    EXPECT_EQ(blockage_count(*blocked, {0.5, 1.0}), 0);
    EXPECT_EQ(blockage_count(*blocked, {1.5, 4.0}), 1);
    EXPECT_EQ(blockage_count(*blocked, {2.0, 4.0}), 2);  // R2 = 1.732 < 2 < R3 = 2.646
}

TEST(BlockageCount, MatchesArcWalk) {
    Rng rng(99);
    std::uniform_real_distribution<double> radius(0.01, 6.0), angle(0.0, kTwoPi);
    for (Variant v : {Variant::basic, Variant::less_correlated, Variant::periodic}) {
        for (int t = 0; t < 50; ++t) {
            const auto tree = sample_tree(make(v, 0.5, 5), rng);
            for (int i = 0; i < 100; ++i) {
                const Polar x{radius(rng), angle(rng)};
                ASSERT_EQ(blockage_count(*tree, x), walk_arcs(*tree, 1.0, x));
            }
        }
    }
}

TEST(BlockageCount, NonDecreasingAlongRay) {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto tree = sample_tree(make(Variant::basic, 0.5, 6), rng);
        const double phi = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
        int prev = 0;
        for (double r = 0.01; r < 8.0; r += 0.01) {
            const int c = blockage_count(*tree, {r, phi});
            EXPECT_GE(c, prev);
            prev = c;
        }
    }
}

TEST(BlockageCount, PeriodicIncrementsAverageOneHalf) {
    Rng rng(17);
    const CascadeGeometry g(1.0, 5);
    const double phi = 1.0;
    const int trials = 20000;
    std::vector<double> sums(5, 0.0);
    for (int t = 0; t < trials; ++t) {
        const auto tree = sample_tree(make(Variant::periodic, 0.5, 5), rng);
        int prev = 0;
        for (int n = 1; n <= 5; ++n) {
            const int c = blockage_count(*tree, {g.radius(n) * 1.0001, phi});
            ASSERT_TRUE(c - prev == 0 || c - prev == 1);
            sums[n - 1] += c - prev;
            prev = c;
        }
    }
    const double sigma = std::sqrt(0.25 / trials);
    for (double s : sums) EXPECT_NEAR(s / trials, 0.5, 3.0 * sigma);
}

TEST(Attenuation, Powers) {
    EXPECT_EQ(penetration_power(0.0, 0), 1.0);
    EXPECT_EQ(penetration_power(0.0, 2), 0.0);
    EXPECT_DOUBLE_EQ(penetration_power(0.1, 3), 0.1 * 0.1 * 0.1);
    // r = 2 crosses circles 1 and 2; only the stage-1 arc on that ray is blocked
    const BlockageTree tree(Variant::basic, CascadeGeometry(1.0, 2), {{1, 0}, {0, 1, 0, 0}});
    EXPECT_DOUBLE_EQ(attenuation(tree, {2.0, 0.3}, 0.1), 0.1);
    EXPECT_DOUBLE_EQ(attenuation(tree, {2.0, 4.0}, 0.1), 1.0);
    const BlockageTree both(Variant::basic, CascadeGeometry(1.0, 2), {{1, 0}, {1, 1, 0, 0}});
    EXPECT_DOUBLE_EQ(attenuation(both, {2.0, 0.3}, 0.1), 0.1 * 0.1);
}

TEST(IndependentPenetration, Examples) {
    Rng rng(2);
    auto params = make(Variant::independent, 0.5, 5, 0.1);
    EXPECT_EQ(independent_penetration(params, 0.5, rng), 1.0);
    params.p = 1.0;
    const CascadeGeometry g(1.0, 5);
    EXPECT_NEAR(independent_penetration(params, g.radius(3) * 1.01, rng), 1e-3, 1e-15);
}

TEST(IndependentPenetration, BinomialPmf) {
    Rng rng(4);
    const auto params = make(Variant::independent, 0.5, 5, 0.1);
    const int n = 100000;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const double att = independent_penetration(params, 2.2, rng);  // between R2 and R3
        const int blocked = static_cast<int>(std::lround(-std::log10(att)));
        ASSERT_GE(blocked, 0);
        ASSERT_LE(blocked, 2);
        ++counts[blocked];
    }
    for (int l = 0; l <= 2; ++l) {
        const double pmf = oracle::choose(2, l) * 0.25;
        const double sigma = std::sqrt(pmf * (1.0 - pmf) / n);
        EXPECT_NEAR(static_cast<double>(counts[l]) / n, pmf, 3.0 * sigma) << "l=" << l;
    }
}

TEST(IndependentPenetration, UnitSpacedMode) {
    Rng rng(4);
    auto params = make(Variant::independent, 1.0, 5, 0.1);
    EXPECT_NEAR(independent_penetration(params, 2.7, rng, StageMode::unit_floor), 0.01, 1e-15);
}
