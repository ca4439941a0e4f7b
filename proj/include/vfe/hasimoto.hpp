#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "vfe/core.hpp"
#include "vfe/operators.hpp"
#include "vfe/timestepper.hpp"

namespace vfe {

using Complex = std::complex<double>;
using ComplexField = std::vector<Complex>;

// Traveling helix v = (a cos th, a sin th, b), th = k s - omega t + phase.
// Substituting into the delta = 0 equation gives
//   omega = b k^2 + alpha k^3 (1 - 3a^2/2),
// and the curve x translates along e3 with speed a^2 k (1 + 3/2 alpha b k).
struct HelixFamily {
    double a = 0.0;
    double b = 1.0;
    double k = 1.0;
    double alpha = -1.0;
    double phase = 0.0;
    double omega = 0.0;
    double drift = 0.0;
};

inline HelixFamily make_helix(double a, double k, double alpha, double phase = 0.0) {
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("helix: a must lie in [0, 1]");
    HelixFamily f;
    f.a = a;
    f.b = std::sqrt(1.0 - a * a);
    f.k = k;
    f.alpha = alpha;
    f.phase = phase;
    f.omega = f.b * k * k + alpha * k * k * k * (1.0 - 1.5 * a * a);
    f.drift = a * a * k * (1.0 + 1.5 * alpha * f.b * k);
    return f;
}

inline Field3 helix_reference(const HelixFamily& f, double t, const GridSpec& g) {
    Field3 v(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double th = f.k * g.s(i) - f.omega * t + f.phase;
        v[i] = {f.a * std::cos(th), f.a * std::sin(th), f.b};
    }
    return v;
}

// Curve whose tangent is helix_reference, with x(0, 0) on the helix axis
// offset (0, -a/k, 0) rotated by the phase.
inline Field3 helix_position(const HelixFamily& f, double t, const GridSpec& g) {
    Field3 x(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) {
        const double s = g.s(i);
        const double th = f.k * s - f.omega * t + f.phase;
        x[i] = {f.a / f.k * std::sin(th), -f.a / f.k * std::cos(th), f.b * s + f.drift * t};
    }
    return x;
}

struct HasimotoOptions {
    int p = 4;
    double curvature_floor = 1e-8;
    bool allow_degenerate = false;
};

// q = kappa exp(i Theta), kappa = |v_s|, Theta = int_0^s tau with
// kappa^2 tau = (v x v_s) . v_ss. Nodes below the curvature floor get tau = 0.
inline ComplexField hasimoto_transform(const Field3& v, const GridSpec& g, const HasimotoOptions& opt = {}) {
    require_aligned(v.size(), g, "hasimoto_transform");
    require_unit(v, 1e-10, "hasimoto_transform");
    const Field3 v1 = diff(v, 1, g, opt.p);
    const Field3 v2 = diff(v, 2, g, opt.p);
    const std::size_t n = v.size();
    Field1 kappa(n), tau(n, 0.0);
    std::size_t low = 0, run = 0, worst_run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        kappa[i] = norm(v1[i]);
        if (kappa[i] < opt.curvature_floor) {
            ++low;
            worst_run = std::max(worst_run, ++run);
        } else {
            run = 0;
            tau[i] = dot(cross(v[i], v1[i]), v2[i]) / (kappa[i] * kappa[i]);
        }
    }
    ComplexField q(n);
    if (low == n) return q;
    if (worst_run >= 2 && !opt.allow_degenerate)
        throw DegenerateFrameError("hasimoto_transform: curvature below " + fmt17(opt.curvature_floor) + " on " +
                                   std::to_string(low) + " nodes; the Frenet frame is undefined there");
    double theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) theta += 0.5 * g.h() * (tau[i - 1] + tau[i]);
        q[i] = std::polar(kappa[i], theta);
    }
    return q;
}

enum class GaugeMode { Fixed, FitUniform };

// Residual of i q_t = q_ss + 1/2 |q|^2 q + i alpha (q_sss + c |q|^2 q_s) - A(t) q.
// With GaugeMode::FitUniform the real A(t) is fitted per time sample by
// least squares; Fixed uses `gauge`.
struct HirotaOptions {
    int p = 4;
    double mkdv = 1.5;
    GaugeMode mode = GaugeMode::Fixed;
    double gauge = 0.0;
};

inline double hirota_residual(const std::vector<ComplexField>& q, double alpha, const GridSpec& g,
                              double dt_sample, const HirotaOptions& opt = {}) {
    if (q.size() < 3) throw ValidationError("hirota_residual needs at least 3 time samples");
    if (!(dt_sample > 0.0)) throw ValidationError("hirota_residual: dt_sample must be > 0");
    for (const auto& f : q) require_aligned(f.size(), g, "hirota_residual");
    const std::size_t n = g.n();
    // The torsion phase is not periodic, so q jumps at the wrap point of a
    // periodic grid; the strip is excluded on both grid kinds.
    const std::size_t strip = static_cast<std::size_t>(3 * opt.p);
    if (2 * strip >= n) throw ResolutionError("hirota_residual: no interior nodes left");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < q.size(); ++k) {
        const ComplexField& c = q[k];
        const ComplexField q1 = diff(c, 1, g, opt.p);
        const ComplexField q2 = diff(c, 2, g, opt.p);
        const ComplexField q3 = diff(c, 3, g, opt.p);
        ComplexField r(n);
        const Complex I(0.0, 1.0);
        for (std::size_t i = strip; i < n - strip; ++i) {
            const Complex qt = (q[k + 1][i] - q[k - 1][i]) / (2.0 * dt_sample);
            const double m2 = std::norm(c[i]);
            r[i] = I * qt - q2[i] - 0.5 * m2 * c[i] - I * alpha * (q3[i] + opt.mkdv * m2 * q1[i]);
        }
        double A = opt.gauge;
        if (opt.mode == GaugeMode::FitUniform) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = strip; i < n - strip; ++i) {
                num += std::real(std::conj(c[i]) * r[i]);
                den += std::norm(c[i]);
            }
            A = den > 0.0 ? -num / den : 0.0;
        }
        for (std::size_t i = strip; i < n - strip; ++i) worst = std::fmax(worst, std::abs(r[i] + A * c[i]));
    }
    return worst;
}

// Plane wave A exp(i(xi s - Omega t)) solves the gauge-free equation when
// Omega = -xi^2 + A^2/2 + alpha xi^3 - c alpha xi A^2.
inline double plane_wave_omega(double amp, double xi, double alpha, double mkdv = 1.5) {
    return -xi * xi + 0.5 * amp * amp + alpha * xi * xi * xi - mkdv * alpha * xi * amp * amp;
}

inline ComplexField plane_wave(double amp, double xi, double alpha, double t, const GridSpec& g,
                               double mkdv = 1.5) {
    const double om = plane_wave_omega(amp, xi, alpha, mkdv);
    ComplexField q(g.n());
    for (std::size_t i = 0; i < g.n(); ++i) q[i] = std::polar(amp, xi * g.s(i) - om * t);
    return q;
}

inline ComplexField conjugate(ComplexField q) {
    for (auto& z : q) z = std::conj(z);
    return q;
}

struct HirotaLevel {
    std::size_t n = 0;
    double dt_sample = 0.0;
    double residual = 0.0;
};

// Joint refinement of a filament run: each level refines the grid and halves
// the sampling interval; the residual uses the conjugated transform, which
// carries the sign convention of the Hirota form above.
inline std::vector<HirotaLevel> hirota_study(const RunConfig& base, int levels, double dt_sample0) {
    if (levels < 1) throw ValidationError("hirota_study needs at least one level");
    std::vector<HirotaLevel> out;
    RunConfig c = base;
    double dts = dt_sample0;
    for (int l = 0; l < levels; ++l) {
        const double dt_max = c.dt > 0.0 ? c.dt : stable_dt(c.params, c.grid);
        const long per = std::max(1L, static_cast<long>(std::ceil(dts / dt_max - 1e-9)));
        const long samples = std::max(2L, static_cast<long>(std::llround(c.t_final / dts)));
        RunConfig cc = c;
        cc.dt = dts / static_cast<double>(per);
        cc.t_final = dts * static_cast<double>(samples);
        cc.diagnostics_every = static_cast<int>(per);
        std::vector<ComplexField> q;
        HasimotoOptions ho;
        ho.p = cc.params.stencil_order;
        run(cc, [&](const SimState& s) { q.push_back(conjugate(hasimoto_transform(normalized(s.v), cc.grid, ho))); });
        HirotaOptions opt;
        opt.p = cc.params.stencil_order;
        opt.mode = GaugeMode::FitUniform;
        out.push_back({cc.grid.n(), dts, hirota_residual(q, cc.params.alpha, cc.grid, dts, opt)});
        c.grid = c.grid.refined();
        if (c.dt > 0.0) c.dt *= 0.5;
        dts *= 0.5;
    }
    return out;
}

}  // namespace vfe
