#include <gtest/gtest.h>

#include "test_fields.hpp"

using namespace vfe;
using vfe::testing::kTwoPi;

TEST(GridSpec, NodesAndSpacing) {
    const GridSpec g = GridSpec::half_line(101, 1.0);
    EXPECT_DOUBLE_EQ(g.h(), 0.01);
    EXPECT_EQ(g.s(0), 0.0);
    EXPECT_NEAR(g.s(100), 1.0, 1e-15);
    const GridSpec r = g.refined();
    EXPECT_EQ(r.n(), 201u);
    EXPECT_DOUBLE_EQ(r.s(2 * 37), g.s(37));
}

TEST(GridSpec, RejectsSmallOrEmpty) {
    EXPECT_THROW(GridSpec::half_line(15, 1.0), ValidationError);
    EXPECT_THROW(GridSpec::half_line(64, 0.0), ValidationError);
    EXPECT_THROW(GridSpec::half_line(64, -2.0), ValidationError);
    EXPECT_NO_THROW(GridSpec::half_line(16, 1.0));
}

TEST(SimParams, Validation) {
    SimParams p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_EQ(p.regime(), Regime::NegAlpha);
    p.alpha = 2.0;
    EXPECT_EQ(p.regime(), Regime::PosAlpha);
    p.alpha = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p.alpha = 1.0;
    p.delta = -1e-3;
    EXPECT_THROW(p.validate(), ValidationError);
    p.delta = 0.0;
    p.stencil_order = 3;
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(L2Norm, ZeroField) {
    const GridSpec g = GridSpec::half_line(33, 3.0);
    EXPECT_EQ(l2_norm(Field3(33), g), 0.0);
}

TEST(L2Norm, ConstantIsExact) {
    const GridSpec g = GridSpec::half_line(101, 1.0);
    EXPECT_NEAR(l2_norm(constant_field(101, {1.0, 0.0, 0.0}), g), 1.0, 1e-12);
    const GridSpec g2 = GridSpec::half_line(57, 7.5);
    const double c = 2.5;
    EXPECT_NEAR(l2_norm(constant_field(57, {0.0, c, 0.0}), g2), c * std::sqrt(7.5), 1e-12 * c * std::sqrt(7.5));
}

TEST(L2Norm, Sine) {
    const GridSpec g = GridSpec::half_line(257, kTwoPi);
    const Field3 f = vfe::testing::sample(g, [](double s) { return Vec3{std::sin(s), 0.0, 0.0}; });
    EXPECT_NEAR(l2_norm(f, g), std::sqrt(std::numbers::pi), 1e-4);
}

TEST(L2Norm, Misaligned) {
    const GridSpec g = GridSpec::half_line(64, 1.0);
    EXPECT_THROW(l2_norm(Field3(63), g), AlignmentError);
    EXPECT_THROW(inner_product(Field3(64), Field3(65), g), AlignmentError);
}

TEST(InnerProduct, Examples) {
    const GridSpec g = GridSpec::half_line(257, kTwoPi);
    const Field3 f = vfe::testing::sample(g, [](double s) { return Vec3{std::sin(s), 0.0, 0.0}; });
    EXPECT_EQ(inner_product(f, Field3(257), g), 0.0);
    EXPECT_EQ(inner_product(constant_field(257, {1, 0, 0}), constant_field(257, {0, 1, 0}), g), 0.0);
    EXPECT_NEAR(inner_product(f, f, g), std::numbers::pi, 1e-4);
}

TEST(InnerProduct, MatchesNormSquaredOnRandomFields) {
    std::mt19937 rng(7);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 50; ++trial) {
        const GridSpec g = GridSpec::half_line(16 + trial * 7, 0.5 + trial);
        Field3 f(g.n()), f2(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) {
            f[i] = {n01(rng), n01(rng), n01(rng)};
            f2[i] = {n01(rng), n01(rng), n01(rng)};
        }
        const double nn = l2_norm(f, g);
        EXPECT_LE(std::fabs(inner_product(f, f, g) - nn * nn), 1e-12 * (1.0 + nn * nn));
        EXPECT_EQ(inner_product(f, f2, g), inner_product(f2, f, g));
    }
}

TEST(UnitDrift, Examples) {
    EXPECT_EQ(sup_norm_unit_drift(constant_field(40, e3)), 0.0);
    EXPECT_NEAR(sup_norm_unit_drift(constant_field(40, {0.0, 0.0, 1.001})), 0.001, 1e-15);
    const GridSpec g = GridSpec::periodic(128, kTwoPi);
    const HelixFamily h = make_helix(0.6, 1.0, -1.0);
    EXPECT_LE(sup_norm_unit_drift(helix_reference(h, 0.3, g)), 1e-15);
}

TEST(Cutoff, ShapeAndSmoothness) {
    EXPECT_EQ(cutoff(0.0), 1.0);
    EXPECT_EQ(cutoff(1.0), 1.0);
    EXPECT_EQ(cutoff(2.0), 0.0);
    EXPECT_EQ(cutoff(5.0, 2.0), 0.0);
    EXPECT_EQ(cutoff(2.0, 2.0), 1.0);
    EXPECT_NEAR(cutoff(1.5), 0.5, 1e-15);
    double prev = 1.0;
    for (int i = 0; i <= 200; ++i) {
        const double c = cutoff(1.0 + i / 200.0);
        EXPECT_LE(c, prev);
        prev = c;
    }
}

TEST(PairwiseSum, Deterministic) {
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / (1.0 + i);
    const double a = pairwise_sum(x);
    const double b = pairwise_sum(x);
    EXPECT_EQ(a, b);
    double naive = 0.0;
    for (double v : x) naive += v;
    EXPECT_NEAR(a, naive, 1e-12);
}
