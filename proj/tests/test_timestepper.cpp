#include <gtest/gtest.h>

#include "test_fields.hpp"

using namespace vfe;
using vfe::testing::kTwoPi;

namespace {

SimParams params(double alpha, double delta = 0.0) {
    SimParams p;
    p.alpha = alpha;
    p.delta = delta;
    return p;
}

RunConfig bump_config(double alpha, double delta, std::size_t n = 512) {
    RunConfig c;
    c.params = params(alpha, delta);
    c.grid = GridSpec::half_line(n, 40.0);
    c.ic.family = "compatible-bump";
    c.t_final = 0.05;
    return c;
}

}  // namespace

TEST(EnforceBoundary, Idempotent) {
    const GridSpec g = GridSpec::half_line(256, 40.0);
    std::mt19937 rng(1);
    for (double alpha : {-1.0, 1.0}) {
        const Field3 bump = vfe::testing::bump_field(g, alpha);
        EXPECT_LE(max_abs_diff(enforce_boundary(bump, params(alpha), g), bump), 1e-14);
        const Field3 once = enforce_boundary(vfe::testing::random_smooth_unit(g, rng), params(alpha), g);
        EXPECT_LE(max_abs_diff(enforce_boundary(once, params(alpha), g), once), 1e-14);
    }
}

TEST(EnforceBoundary, PinsNodeZeroForPositiveAlpha) {
    const GridSpec g = GridSpec::half_line(64, 4.0);
    Field3 v = constant_field(64, e3);
    v[0] = e3 + Vec3{1e-3, 0.0, 0.0};
    const Field3 out = enforce_boundary(v, params(1.0), g);
    EXPECT_EQ(out[0].x, 0.0);
    EXPECT_EQ(out[0].y, 0.0);
    EXPECT_EQ(out[0].z, 1.0);
}

TEST(EnforceBoundary, NegativeAlphaZeroesOneSidedDerivative) {
    const GridSpec g = GridSpec::half_line(64, 4.0);
    for (int p : {2, 4, 6}) {
        SimParams sp = params(-1.0);
        sp.stencil_order = p;
        const Field3 v = vfe::testing::sample(g, [](double s) { return Vec3{0.1 + 0.2 * s, -0.3 * s, 1.0}; });
        const Field3 out = enforce_boundary(v, sp, g);
        EXPECT_LE(max_abs(diff(out, 1, g, p)[0]), 1e-12) << "p=" << p;
        // Only the end nodes move.
        for (std::size_t i = 1; i + 1 < g.n(); ++i) EXPECT_EQ(max_abs(out[i] - v[i]), 0.0);
    }
}

TEST(StableDt, Scaling) {
    const GridSpec g = GridSpec::half_line(129, 8.0);
    const GridSpec g2 = g.refined();
    ASSERT_DOUBLE_EQ(g2.h(), 0.5 * g.h());
    EXPECT_NEAR(stable_dt(params(-1.0), g) / stable_dt(params(-1.0), g2), 8.0, 1e-12);
    EXPECT_NEAR(stable_dt(params(0.5), g) / stable_dt(params(1.0), g), 2.0, 1e-12);
    EXPECT_NEAR(stable_dt(params(-0.5), g) / stable_dt(params(-1.0), g), 2.0, 1e-12);
    // A large delta switches the limit to the diffusive h^2 bound.
    EXPECT_LT(stable_dt(params(-1.0, 1000.0), g), stable_dt(params(-1.0), g));
    SimParams safe = params(-1.0);
    safe.cfl_safety = 0.25;
    EXPECT_NEAR(stable_dt(safe, g) / stable_dt(params(-1.0), g), 0.5, 1e-12);
}

// The largest stable dt on the linearization about e3 lies within [0.5, 1]
// of the predicted bound stable_dt / cfl_safety.
TEST(StableDt, StabilitySweep) {
    const GridSpec g = GridSpec::periodic(64, kTwoPi);
    for (double alpha : {-1.0, 1.0})
        for (double delta : {0.0, 0.05}) {
            RunConfig c;
            c.grid = g;
            c.params = params(alpha, delta);
            const double bound = stable_dt(c.params, g) / c.params.cfl_safety;
            std::mt19937 rng(3);
            std::normal_distribution<double> n01;
            Field3 v0(g.n());
            for (auto& x : v0) x = e3 + 1e-8 * Vec3{n01(rng), n01(rng), 0.0};
            v0 = normalized(std::move(v0));
            auto stable = [&](double f) {
                SimState s;
                s.v = v0;
                const double d0 = max_abs_diff(v0, constant_field(g.n(), e3));
                try {
                    for (int k = 0; k < 400; ++k) s = step(s, f * bound, c);
                } catch (const InstabilityError&) {
                    return false;
                }
                return max_abs_diff(s.v, constant_field(g.n(), e3)) <= 10.0 * d0;
            };
            ASSERT_TRUE(stable(0.3));
            ASSERT_FALSE(stable(1.6));
            double largest = 0.3, unstable = 1.6;
            while (unstable - largest > 0.01) {
                const double f = 0.5 * (largest + unstable);
                (stable(f) ? largest : unstable) = f;
            }
            EXPECT_GE(largest, 0.5) << "alpha=" << alpha << " delta=" << delta;
            EXPECT_LE(largest, 1.0 + 1e-9) << "alpha=" << alpha << " delta=" << delta;
        }
}

TEST(Step, ConstantIsEquilibrium) {
    for (const GridSpec& g : {GridSpec::half_line(64, 4.0), GridSpec::periodic(64, 4.0)})
        for (double alpha : {-1.0, 1.0})
            for (double delta : {0.0, 1e-2}) {
                RunConfig c;
                c.grid = g;
                c.params = params(alpha, delta);
                SimState s;
                s.v = constant_field(64, e3);
                s.t = 0.25;
                const double dt = stable_dt(c.params, g);
                const SimState out = step(s, dt, c);
                EXPECT_LE(max_abs(out.v - s.v), 1e-15);
                EXPECT_EQ(out.t, 0.25 + dt);
                EXPECT_EQ(out.step_count, 1);
            }
}

// Drift after one stable step falls about 100x per grid doubling; 1e-10 holds
// from N = 1023 on.
TEST(Step, BumpDriftAfterOneStep) {
    std::vector<double> drift;
    for (std::size_t n : {512u, 1023u}) {
        const RunConfig c = bump_config(-1.0, 1e-3, n);
        SimState s;
        s.v = load_initial_condition(c.ic, c.grid, c.params);
        s = step(s, stable_dt(c.params, c.grid), c);
        drift.push_back(sup_norm_unit_drift(s.v));
    }
    EXPECT_LE(drift[1], 1e-10);
    EXPECT_LT(drift[1], 0.1 * drift[0]);
}

TEST(Step, HelixPhaseAdvance) {
    const HelixFamily h = make_helix(0.6, 1.0, -1.0);
    std::vector<double> err;
    for (std::size_t n : {64u, 128u}) {
        RunConfig c;
        c.grid = GridSpec::periodic(n, kTwoPi);
        SimState s;
        s.v = helix_reference(h, 0.0, c.grid);
        const double dt = stable_dt(c.params, c.grid);
        for (int k = 0; k < 20; ++k) s = step(s, dt, c);
        err.push_back(max_abs_diff(s.v, helix_reference(h, s.t, c.grid)));
    }
    EXPECT_LE(err[1], 1e-9);
    EXPECT_GE(err[0] / err[1], 8.0);
}

TEST(Step, InstabilityIsReported) {
    const GridSpec g = GridSpec::periodic(64, kTwoPi);
    RunConfig c;
    c.grid = g;
    std::mt19937 rng(2);
    SimState s;
    s.v = vfe::testing::random_smooth_unit(g, rng, 0.3, 12);
    const double dt = 50.0 * stable_dt(c.params, g);
    try {
        for (int k = 0; k < 200; ++k) s = step(s, dt, c);
        FAIL() << "expected an instability error";
    } catch (const InstabilityError& e) {
        EXPECT_NE(std::string(e.what()).find("dt/stable_dt"), std::string::npos);
    }
}

TEST(Run, ConstantDatum) {
    for (double alpha : {-1.0, 1.0}) {
        RunConfig c;
        c.params = params(alpha, 1e-3);
        c.grid = GridSpec::half_line(64, 8.0);
        c.ic.family = "e3";
        c.t_final = 0.3;
        const RunResult r = run(c);
        EXPECT_EQ(max_abs(r.state.v - constant_field(64, e3)), 0.0);
        EXPECT_NEAR(r.state.t, 0.3, 0.0);
        ASSERT_GE(r.records.size(), 2u);
        for (const auto& rec : r.records) {
            EXPECT_EQ(rec.unit_norm_drift, 0.0);
            EXPECT_EQ(rec.norm_vs, 0.0);
            EXPECT_EQ(rec.energy_E2, 0.0);
            EXPECT_EQ(rec.modified_E3, 0.0);
            for (const auto& [k, x] : rec.boundary_residuals) EXPECT_EQ(x, 0.0) << k;
            for (const auto& [k, x] : rec.identity_residuals) EXPECT_EQ(x, 0.0) << k;
        }
        EXPECT_TRUE(r.warnings.empty());
    }
}

TEST(Run, BumpUnitDrift) {
    const RunResult r = run(bump_config(-1.0, 1e-3, 1023));
    double worst = 0.0;
    for (const auto& rec : r.records) worst = std::fmax(worst, rec.unit_norm_drift);
    EXPECT_LE(worst, 1e-8);
}

TEST(Run, SpatialOrder) {
    RunConfig c = bump_config(-1.0, 1e-3, 256);
    c.t_final = 0.02;
    const auto levels = convergence_study(c, 3);
    ASSERT_EQ(levels.size(), 3u);
    EXPECT_GE(levels[1].order, 3.0);
    EXPECT_GE(levels[2].drift_order, 3.0);
}

TEST(Run, Deterministic) {
    RunConfig c = bump_config(1.0, 1e-3, 256);
    c.t_final = 0.01;
    c.far_field_tol = 1.0;
    const RunResult a = run(c), b = run(c);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) EXPECT_TRUE(a.records[k] == b.records[k]);
    EXPECT_EQ(max_abs(a.state.v - b.state.v), 0.0);
}

TEST(Run, BoundaryResidualsStaySmall) {
    RunConfig neg = bump_config(-1.0, 1e-3, 256);
    neg.t_final = 0.02;
    for (const auto& rec : run(neg).records) EXPECT_LE(rec.boundary_residuals.at("v_s(0)"), 1e-12);

    // alpha > 0 holds v_s(0) = 0 through the ghost closure, so the one-sided
    // derivative sees stencil error only.
    std::vector<double> worst;
    for (std::size_t n : {512u, 1023u}) {
        RunConfig pos;
        pos.params = params(1.0);
        pos.grid = GridSpec::half_line(n, 40.0);
        pos.ic.family = "onset";
        pos.t_final = 0.02;
        double w = 0.0;
        for (const auto& rec : run(pos).records) {
            EXPECT_EQ(rec.boundary_residuals.at("v(0)-e3"), 0.0);
            w = std::fmax(w, rec.boundary_residuals.at("v_s(0)"));
        }
        worst.push_back(w);
    }
    EXPECT_LE(worst[0], 1e-5);
    EXPECT_GE(worst[0] / worst[1], 8.0);
}

TEST(Run, IncompatibleDatumWarns) {
    RunConfig c;
    c.params = params(-1.0);
    c.grid = GridSpec::half_line(128, 10.0);
    c.initial = normalized(vfe::testing::sample(c.grid, [](double s) {
        return e3 + Vec3{0.01 * s * cutoff(s, 2.0), 0.0, 0.0};
    }));
    c.t_final = 1e-4;
    const RunResult r = run(c);
    EXPECT_FALSE(r.compat.passed());
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("compatibility"), std::string::npos);
}

TEST(Run, FarFieldActivityAborts) {
    RunConfig c;
    c.params = params(1.0);
    c.grid = GridSpec::half_line(256, 20.0);
    c.ic.family = "onset";
    c.t_final = 0.1;
    try {
        run(c);
        FAIL() << "expected a far-field error";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("far-field"), std::string::npos);
    }
}

TEST(Run, ConfigValidation) {
    RunConfig c;
    c.t_final = 0.0;
    EXPECT_THROW(run(c), ValidationError);
    c.t_final = 0.1;
    c.dt = -1.0;
    EXPECT_THROW(run(c), ValidationError);
    c.dt = 0.0;
    c.params.alpha = 0.0;
    EXPECT_THROW(run(c), ValidationError);
}

TEST(ReconstructX, ConstantTrajectory) {
    const GridSpec g = GridSpec::half_line(32, 3.0);
    const Field3 x0 = vfe::testing::sample(g, [](double s) { return Vec3{1.0, 2.0, s}; });
    const std::vector<Field3> samples(5, constant_field(32, e3));
    const Field3 x = reconstruct_x(samples, {0.0, 0.1, 0.2, 0.3, 0.4}, x0, params(-1.0), g);
    EXPECT_EQ(max_abs(x - x0), 0.0);
    EXPECT_THROW(reconstruct_x({samples[0]}, {0.0}, x0, params(-1.0), g), ValidationError);
}

// Rigid motion of the helix: x(t) is the rotated and translated curve.
TEST(ReconstructX, HelixRigidMotion) {
    const HelixFamily h = make_helix(0.6, 1.0, -1.0);
    RunConfig c;
    c.grid = GridSpec::periodic(128, kTwoPi);
    c.initial = helix_reference(h, 0.0, c.grid);
    c.t_final = 0.05;
    c.diagnostics_every = 1;
    std::vector<Field3> v;
    std::vector<double> t;
    run(c, [&](const SimState& s) {
        v.push_back(s.v);
        t.push_back(s.t);
    });
    const Field3 x0 = helix_position(h, 0.0, c.grid);
    const Field3 x = reconstruct_x(v, t, x0, c.params, c.grid);
    EXPECT_LE(max_abs_diff(x, helix_position(h, c.t_final, c.grid)), 1e-8);
    for (std::size_t i = 8; i + 8 < c.grid.n(); ++i) {
        const double s = c.grid.s(i);
        const double th = h.k * s - h.omega * c.t_final + h.phase;
        const Vec3 exact{h.a * std::cos(th), h.a * std::sin(th), h.b};
        EXPECT_LE(max_abs(v.back()[i] - exact), 1e-8);
    }
}

TEST(ReconstructX, TrackedPositionMatchesQuadrature) {
    RunConfig c = bump_config(-1.0, 1e-3, 256);
    c.t_final = 0.01;
    c.track_x = true;
    c.diagnostics_every = 1;
    std::vector<Field3> v;
    std::vector<double> t;
    Field3 x0;
    const RunResult r = run(c, [&](const SimState& s) {
        if (v.empty()) x0 = s.x;
        v.push_back(s.v);
        t.push_back(s.t);
    });
    const Field3 x = reconstruct_x(v, t, x0, c.params, c.grid);
    EXPECT_LE(max_abs_diff(x, r.state.x), 1e-10);
    // v = x_s in the interior.
    const Field3 xs = diff(r.state.x, 1, c.grid, 4);
    for (std::size_t i = 0; i < c.grid.n(); ++i) EXPECT_LE(max_abs(xs[i] - r.state.v[i]), 1e-5);
}

TEST(Continuation, RepeatedDeltasGiveZero) {
    RunConfig c = bump_config(-1.0, 1e-3, 256);
    c.t_final = 0.005;
    const ContinuationResult r = delta_continuation(c, {1e-3, 1e-3}, 1);
    ASSERT_EQ(r.pairwise_h1_diffs.size(), 1u);
    EXPECT_EQ(r.pairwise_h1_diffs[0], 0.0);
    EXPECT_TRUE(r.failures.empty());
}

TEST(Continuation, Validation) {
    const RunConfig c = bump_config(-1.0, 1e-3, 256);
    EXPECT_THROW(delta_continuation(c, {1e-3}, 1), ValidationError);
    EXPECT_THROW(delta_continuation(c, {1e-3, 1e-2}, 1), ValidationError);
    EXPECT_THROW(delta_continuation(c, {1e-3, 0.0}, 1), ValidationError);
}

TEST(Continuation, LogLogSlope) {
    std::vector<double> x{1e-2, 1e-3, 1e-4}, y;
    for (double d : x) y.push_back(3.0 * std::sqrt(d));
    EXPECT_NEAR(loglog_slope(x, y), 0.5, 1e-12);
}
