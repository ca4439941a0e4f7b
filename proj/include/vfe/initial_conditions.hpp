#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "vfe/core.hpp"
#include "vfe/io.hpp"

namespace vfe {

// Named initial data. Parameters left as NaN take a family default.
struct IcSpec {
    std::string family = "e3";  // e3 | compatible-bump | helix-cap | corner | onset | helix | perturbed-helix | file
    std::string file;
    double amplitude = std::nan("");
    double center = std::nan("");     // bump center, default 0.35 L
    double width = std::nan("");      // bump half-width, default 0.275 L
    double wavenumber = std::nan("");
    double support = 3.0;             // corner cutoff scale
    double helix_a = 0.6;
    double phase = 0.0;

    bool operator==(const IcSpec&) const = default;
};

inline double or_default(double x, double d) { return std::isnan(x) ? d : x; }

// Compact bump exp(1 - 1/(1 - r^2)) on |r| < 1, peak value 1.
inline double bump(double r) {
    if (std::fabs(r) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

// Smooth step: 0 for x <= 0, 1 for x >= 1.
inline double smooth_step(double x) { return 1.0 - cutoff(1.0 + x, 1.0); }

inline void validate_far_field(const Field3& v, double tol = 1e-12) {
    const std::size_t n = v.size();
    const std::size_t start = n - 1 - (n - 1) / 10;
    double worst = 0.0;
    for (std::size_t i = start; i < n; ++i) worst = std::fmax(worst, max_abs(v[i] - v[n - 1]));
    if (worst > tol)
        throw ValidationError("initial condition is not constant on the last 10% of the domain "
                              "(deviation " + fmt17(worst) + "); the right-end clamp needs a flat far field");
}

// 4th-order cumulative integral from s = 0, exact for cubics.
inline Field3 cumulative_integral(const Field3& f, const GridSpec& g) {
    require_aligned(f.size(), g, "cumulative_integral");
    const std::size_t n = g.n();
    const double h = g.h();
    Field3 out(n);
    auto at = [&](long i) -> const Vec3& {
        const long nn = static_cast<long>(n);
        return f[static_cast<std::size_t>(((i % nn) + nn) % nn)];
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Vec3 piece;
        const long li = static_cast<long>(i);
        if (g.is_periodic() || (i >= 1 && i + 2 < n))
            piece = (h / 24.0) * (-1.0 * at(li - 1) + 13.0 * at(li) + 13.0 * at(li + 1) - 1.0 * at(li + 2));
        else if (i == 0)
            piece = (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        else
            piece = (h / 24.0) * (f[i - 2] - 5.0 * f[i - 1] + 19.0 * f[i] + 9.0 * f[i + 1]);
        out[i + 1] = out[i] + piece;
    }
    return out;
}

inline Field3 load_initial_condition(const IcSpec& spec, const GridSpec& g, const SimParams& params,
                                     bool check_far_field = true) {
    const std::size_t n = g.n();
    const double L = g.length();
    Field3 v(n);
    const std::string& fam = spec.family;

    if (fam == "e3") {
        v = constant_field(n, e3);
    } else if (fam == "compatible-bump") {
        const double A = or_default(spec.amplitude, 0.15);
        const double c = or_default(spec.center, 0.35 * L);
        const double w = or_default(spec.width, 0.275 * L);
        const double kap = or_default(spec.wavenumber, 0.3);
        if (c - w <= 0.0 || c + w >= 0.9 * L)
            throw ValidationError("ic: bump support must lie inside (0, 0.9 L)");
        for (std::size_t i = 0; i < n; ++i) {
            const double s = g.s(i);
            const double b = A * bump((s - c) / w);
            v[i] = e3 + b * Vec3{std::cos(kap * (s - c)), std::sin(kap * (s - c)), 0.0};
        }
    } else if (fam == "helix-cap") {
        // Helix windowed to zero on [0, 0.1 L] and [0.8 L, L].
        const double A = or_default(spec.amplitude, 0.3);
        const double k = or_default(spec.wavenumber, 1.0);
        const double l = 0.1 * L;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = g.s(i);
            const double w = smooth_step((s - l) / l) * (1.0 - smooth_step((s - 0.7 * L) / l));
            v[i] = Vec3{A * w * std::cos(k * s + spec.phase), A * w * std::sin(k * s + spec.phase), 1.0};
        }
    } else if (fam == "corner") {
        // Polynomial corner data, compatible to order 1 for the unregularized
        // problem (so the regularized datum needs correction at order 1).
        const double A = or_default(spec.amplitude, 0.05);
        const double a = params.alpha;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = g.s(i);
            const double phi = cutoff(s, spec.support);
            Vec3 u;
            if (params.regime() == Regime::NegAlpha)
                u = {A * s * s * s / 6.0, -A * std::pow(s, 4) / (24.0 * a), 0.0};
            else
                u = {A * s * s / 2.0 - A * std::pow(s, 4) / (24.0 * a * a), -A * s * s * s / (6.0 * a), 0.0};
            v[i] = e3 + phi * u;
        }
    } else if (fam == "onset") {
        // e3 + A r^8 exp(-r^2) (cos k s, sin k s, 0), r = s / width: all
        // derivatives through order 7 vanish at 0 and the spectrum is
        // Gaussian, so the data stay resolved at grid scale.
        const double A = or_default(spec.amplitude, 0.02);
        const double w = or_default(spec.width, 1.0);
        const double k = or_default(spec.wavenumber, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = g.s(i);
            const double r = s / w;
            const double b = A * std::pow(r, 8) * std::exp(-r * r);
            v[i] = e3 + b * Vec3{std::cos(k * s + spec.phase), std::sin(k * s + spec.phase), 0.0};
        }
    } else if (fam == "helix" || fam == "perturbed-helix") {
        if (!g.is_periodic()) throw ValidationError("ic: '" + fam + "' needs a periodic grid");
        const double a = spec.helix_a;
        if (!(a >= 0.0 && a < 1.0)) throw ValidationError("ic: helix_a must lie in [0, 1)");
        const double b = std::sqrt(1.0 - a * a);
        const double k0 = 2.0 * std::numbers::pi / L;
        const double k = or_default(spec.wavenumber, k0);
        const double eps = fam == "perturbed-helix" ? or_default(spec.amplitude, 0.05) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = g.s(i);
            const double th = k * s + spec.phase;
            v[i] = Vec3{a * std::cos(th), a * std::sin(th), b} +
                   eps * Vec3{std::cos(k0 * s), std::sin(2.0 * k0 * s), std::cos(k0 * s)};
        }
    } else if (fam == "file") {
        const Snapshot snap = read_snapshot(spec.file);
        if (!(snap.grid == g))
            throw ValidationError("ic: snapshot grid (n=" + std::to_string(snap.grid.n()) +
                                  ") does not match the configured grid");
        v = snap.v;
    } else {
        throw ValidationError("ic.family: unknown family '" + fam + "'");
    }

    if (fam != "file") v = normalized(std::move(v));
    if (check_far_field && !g.is_periodic()) validate_far_field(v);
    return v;
}

}  // namespace vfe
