#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "cascade/geometry.hpp"
#include "cascade/params.hpp"

using namespace cascade;

TEST(Radius, KnownValues) {
    const CascadeGeometry g(1.0, 5);
    EXPECT_EQ(g.radius(0), 0.0);
    EXPECT_DOUBLE_EQ(g.radius(1), 1.0);
    EXPECT_DOUBLE_EQ(g.radius(2), std::sqrt(3.0));
    EXPECT_NEAR(g.radius(5), 5.5677643628300215, 1e-14);
}

TEST(Radius, RejectsNegativeStage) {
    const CascadeGeometry g(1.0, 5);
    EXPECT_THROW(g.radius(-1), ConfigError);
}

TEST(Radius, EveryAnnulusHoldsTwoToTheNBoxes) {
    for (double R : {0.5, 1.0, 3.0}) {
        const CascadeGeometry g(R);
        const double V = g.box_volume();
        for (int n = 0; n < 30; ++n) {
            const double ring = std::numbers::pi * (g.radius(n + 1) * g.radius(n + 1) - g.radius(n) * g.radius(n));
            EXPECT_NEAR(ring / (std::ldexp(1.0, n) * V * 2.0), 1.0, 1e-12) << "R=" << R << " n=" << n;
            // squared radius increment is 2^n R^2
            const double inc = g.radius(n + 1) * g.radius(n + 1) - g.radius(n) * g.radius(n);
            EXPECT_NEAR(inc / (std::ldexp(1.0, n) * R * R), 1.0, 1e-12);
        }
    }
}

TEST(BoxVolume, Variants) {
    const CascadeGeometry g(1.0, 5);
    EXPECT_DOUBLE_EQ(g.box_volume(), std::numbers::pi / 2.0);
    EXPECT_DOUBLE_EQ(g.box_volume(ArcWidth::half), std::numbers::pi / 4.0);
    EXPECT_DOUBLE_EQ(g.box_volume(ArcWidth::full, 3), std::numbers::pi / 16.0);
}

TEST(ArcIndex, Examples) {
    EXPECT_EQ(CascadeGeometry::arc_index(1, 0.0), 0);
    EXPECT_EQ(CascadeGeometry::arc_index(1, std::numbers::pi), 1);
    EXPECT_EQ(CascadeGeometry::arc_index(2, 3.0 * std::numbers::pi / 2.0), 3);
    EXPECT_EQ(CascadeGeometry::arc_index(2, std::numbers::pi / 2.0 - 1e-12), 0);
    EXPECT_EQ(CascadeGeometry::arc_index(1, std::numbers::pi / 2.0, ArcWidth::half), 1);
    EXPECT_EQ(CascadeGeometry::arc_count(3, ArcWidth::full), 8);
    EXPECT_EQ(CascadeGeometry::arc_count(3, ArcWidth::half), 16);
}

TEST(ArcIndex, RejectsOutOfRangeAngles) {
    EXPECT_THROW(CascadeGeometry::arc_index(1, -0.1), ConfigError);
    EXPECT_THROW(CascadeGeometry::arc_index(1, kTwoPi), ConfigError);
    EXPECT_THROW(CascadeGeometry::arc_index(1, std::nan("")), ConfigError);
}

TEST(ArcIndex, PiecewiseConstantAndSurjective) {
    for (ArcWidth w : {ArcWidth::full, ArcWidth::half}) {
        for (int n = 1; n <= 6; ++n) {
            const long long count = CascadeGeometry::arc_count(n, w);
            const int samples = static_cast<int>(count) * 16;
            std::set<long long> seen;
            long long prev = -1;
            int changes = 0;
            for (int i = 0; i < samples; ++i) {
                const double phi = kTwoPi * (i + 0.5) / samples;
                const long long a = CascadeGeometry::arc_index(n, phi, w);
                ASSERT_GE(a, 0);
                ASSERT_LT(a, count);
                if (prev >= 0 && a != prev) {
                    EXPECT_EQ(a, prev + 1);
                    ++changes;
                }
                prev = a;
                seen.insert(a);
            }
            EXPECT_EQ(static_cast<long long>(seen.size()), count);
            EXPECT_EQ(changes, count - 1);
        }
    }
}

TEST(StageOfRadius, Geometric) {
    const CascadeGeometry g(1.0, 5);
    EXPECT_EQ(g.stage_of_radius(0.5), 0);
    EXPECT_EQ(g.stage_of_radius(1.5), 1);
    EXPECT_EQ(g.stage_of_radius(2.0), 2);
    EXPECT_EQ(g.stage_of_radius(5.0), 4);
}

TEST(StageOfRadius, JumpsByOneAtEachCircle) {
    const CascadeGeometry g(1.0, 8);
    for (int n = 1; n <= 8; ++n) {
        const double r = g.radius(n);
        EXPECT_EQ(g.stage_of_radius(r * (1.0 - 1e-9)), n - 1);
        EXPECT_EQ(g.stage_of_radius(r * (1.0 + 1e-9)), n);
    }
}

TEST(StageOfRadius, UnitSpacedMode) {
    const CascadeGeometry g(1.0, 5);
    EXPECT_EQ(g.stage_of_radius(2.7, StageMode::unit_floor), 2);
    EXPECT_EQ(g.stage_of_radius(0.3, StageMode::unit_floor), 0);
}

TEST(NormalizeAngle, WrapsIntoRange) {
    EXPECT_NEAR(normalize_angle(-std::numbers::pi / 2.0), 1.5 * std::numbers::pi, 1e-15);
    EXPECT_NEAR(normalize_angle(5.0 * std::numbers::pi), std::numbers::pi, 1e-12);
    const double w = normalize_angle(kTwoPi);
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, kTwoPi);
}

TEST(Params, Validation) {
    ModelParams ok;
    EXPECT_NO_THROW(ok.validate());
    ModelParams bad = ok;
    bad.p = 1.2;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = ok;
    bad.K = -0.1;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = ok;
    bad.base_radius = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = ok;
    bad.stages = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = ok;
    bad.stages.reset();
    bad.p = 0.4;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad.variant = Variant::periodic;
    bad.p = 0.9;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Params, VariantNames) {
    for (Variant v : {Variant::basic, Variant::less_correlated, Variant::periodic, Variant::independent})
        EXPECT_EQ(parse_variant(to_string(v)), v);
    EXPECT_THROW(parse_variant("hexagonal"), ConfigError);
}
