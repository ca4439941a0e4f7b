#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vfe/core.hpp"
#include "vfe/jet.hpp"
#include "vfe/operators.hpp"
#include "vfe/recursion.hpp"

namespace vfe {

struct RecursionConfig {
    int n_max = 2;
    double fd_epsilon = 1e-5;
    // Boundary values come from a Taylor jet at s = 0 fitted with one-sided
    // stencils on degree + 1 + jet_extra nodes.
    int jet_extra = 8;
};

inline void check_recursion_order(int n, const GridSpec& g, int p) {
    if (n < 0) throw ValidationError("recursion order must be >= 0");
    if (n > 0 && static_cast<std::size_t>(3 + p) > g.n() / 2)
        throw ResolutionError("recursion order " + std::to_string(n) + " is not resolvable on " +
                              std::to_string(g.n()) + " nodes");
}

inline std::vector<Field3> compute_P_sequence(int n, const Field3& v0, const SimParams& params,
                                              const GridSpec& g) {
    require_aligned(v0.size(), g, "compute_P");
    check_recursion_order(n, g, params.stencil_order);
    return p_sequence(FieldCalculus{g, params.stencil_order}, v0, n, params.alpha, params.delta);
}

inline Field3 compute_P(int n, const Field3& v0, const SimParams& params, const GridSpec& g) {
    return compute_P_sequence(n, v0, params, g)[n];
}

inline Field3 compute_Q(int n, const Field3& v0, const SimParams& params, const GridSpec& g) {
    SimParams q = params;
    q.delta = 0.0;
    return compute_P(n, v0, q, g);
}

// ---------------------------------------------------------------------------
// Sequences g_m (regularized), f_m (delta = 0) and r_m, built from the
// directional derivative D exactly as they are defined, not from the
// recursion above. Used as an independent route to P_(m).

using FieldMap = std::function<Field3(const Field3&)>;

// Central difference (map(V + eps W) - map(V - eps W)) / (2 eps), with the
// step scaled so that |eps W| <= eps.
inline Field3 frechet(const FieldMap& map, const Field3& V, const Field3& W, double eps) {
    if (!(eps > 0.0)) throw ValidationError("frechet: eps must be positive");
    const double scale = max_abs(W);
    if (scale == 0.0) return Field3(V.size());
    const double e = eps / std::fmax(1.0, scale);
    Field3 out = map(V + e * W) - map(V - e * W);
    out = (0.5 / e) * std::move(out);
    if (!all_finite(out)) throw NumericalError("frechet: non-finite evaluation");
    return out;
}

enum class SequenceKind { G, F, R };

inline Field3 evaluate_sequence(SequenceKind kind, int m, const Field3& V, const SimParams& params,
                                const GridSpec& g, double eps);

inline FieldMap sequence_map(SequenceKind kind, int m, const SimParams& params, const GridSpec& g,
                             double eps) {
    return [=](const Field3& V) { return evaluate_sequence(kind, m, V, params, g, eps); };
}

inline Field3 evaluate_sequence(SequenceKind kind, int m, const Field3& V, const SimParams& params,
                                const GridSpec& g, double eps) {
    SimParams p0 = params;
    p0.delta = 0.0;
    switch (kind) {
        case SequenceKind::G:
        case SequenceKind::F: {
            const SimParams& p = kind == SequenceKind::G ? params : p0;
            if (m == 0) return V;
            if (m == 1) return rhs_v_transformed(V, p, g);
            return frechet(sequence_map(kind, m - 1, params, g, eps), V, rhs_v_transformed(V, p, g),
                           eps);
        }
        case SequenceKind::R: {
            if (m < 1) throw ValidationError("r_m is defined for m >= 1");
            if (m == 1) {
                const int p = params.stencil_order;
                const Field3 v1 = diff(V, 1, g, p);
                return diff(V, 2, g, p) + mul(dot(v1, v1), V);
            }
            const Field3 g1 = rhs_v_transformed(V, params, g);
            const Field3 r1 = evaluate_sequence(SequenceKind::R, 1, V, params, g, eps);
            return frechet(sequence_map(SequenceKind::R, m - 1, params, g, eps), V, g1, eps) +
                   frechet(sequence_map(SequenceKind::F, m - 1, params, g, eps), V, r1, eps);
        }
    }
    return V;
}

// ---------------------------------------------------------------------------

struct OrderResult {
    int n = 0;
    std::vector<std::pair<std::string, double>> residuals;
    bool passed = true;

    double max_residual() const {
        double m = 0.0;
        for (const auto& r : residuals) m = std::fmax(m, r.second);
        return m;
    }
};

struct CompatibilityReport {
    Regime regime = Regime::NegAlpha;
    double delta = 0.0;
    double tolerance = 0.0;
    std::vector<OrderResult> orders;

    bool passed() const {
        for (const auto& o : orders)
            if (!o.passed) return false;
        return true;
    }
    bool passed_up_to(int n) const {
        for (const auto& o : orders)
            if (o.n <= n && !o.passed) return false;
        return true;
    }
};

// Boundary values of P_(n)(v0) for n = 0..n_max, via the jet of v0 at s = 0.
inline std::vector<Jet3> boundary_p_jets(const Field3& v0, const SimParams& params,
                                         const GridSpec& g, int n_max, int jet_extra) {
    if (g.is_periodic()) throw ValidationError("compatibility conditions need a half-line grid");
    // Renormalizing in jet space rebuilds the component along v0(0) from the
    // others; fitted directly it carries roundoff amplified by h^-k.
    const Jet3 jet = normalized(boundary_jet(v0, g, 3 * n_max + 1, jet_extra));
    return p_sequence(JetCalculus{}, jet, n_max, params.alpha, params.delta);
}

inline CompatibilityReport report_from_jets(const std::vector<Jet3>& P, const SimParams& params,
                                            double tol) {
    CompatibilityReport rep;
    rep.regime = params.regime();
    rep.delta = params.delta;
    rep.tolerance = tol;
    const bool pos = params.regime() == Regime::PosAlpha;
    for (int n = 0; n < static_cast<int>(P.size()); ++n) {
        OrderResult o;
        o.n = n;
        if (n == 0) {
            if (pos) o.residuals.emplace_back("v(0)-e3", norm(P[0].value(0) - e3));
            o.residuals.emplace_back("v_s(0)", norm(P[0].value(1)));
        } else {
            if (pos) o.residuals.emplace_back("P(0)", norm(P[n].value(0)));
            o.residuals.emplace_back("P_s(0)", norm(P[n].value(1)));
        }
        o.passed = o.max_residual() <= tol;
        rep.orders.push_back(std::move(o));
    }
    return rep;
}

// n-th "compatibility condition" residuals for orders 0..n_max. alpha < 0:
// |d_s P_(n)(v0)(0)|. alpha > 0: |v0(0) - e3| and |v0_s(0)| at order 0,
// |P_(n)(v0)(0)| and |d_s P_(n)(v0)(0)| above. P reduces to Q at delta = 0.
inline CompatibilityReport check_compatibility(const Field3& v0, const SimParams& params,
                                               const GridSpec& g, int n_max, double tol,
                                               const RecursionConfig& cfg = {}) {
    require_aligned(v0.size(), g, "check_compatibility");
    if (n_max < 0) throw ValidationError("check_compatibility: n_max must be >= 0");
    return report_from_jets(boundary_p_jets(v0, params, g, n_max, cfg.jet_extra), params, tol);
}

// ---------------------------------------------------------------------------

struct CorrectionConfig {
    double cutoff_support = 2.0;
    int jet_extra = 8;
    double precondition_tol = 1e-6;
    double residual_tol = 1e-7;
    int max_iterations = 12;
};

struct CorrectionResult {
    Field3 corrected;
    Field3 h_field;
    // d^{3j+1}_s h(0), j = 0..m.
    std::vector<Vec3> coefficients;
    // d^{3j}_s h(0), j = 0..m; nonzero only for alpha > 0.
    std::vector<Vec3> cubic_coefficients;
    std::vector<double> residual_before;
    std::vector<double> residual_after;
    // max_j |coefficient_j| / delta.
    double coefficient_constant = 0.0;
};

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline std::vector<double> order_residuals(const CompatibilityReport& rep) {
    std::vector<double> r;
    for (const auto& o : rep.orders) r.push_back(o.max_residual());
    return r;
}

// Corrected datum v0^delta = (v0 + h)/|v0 + h| with
// h(s) = phi(s) sum_j d^{3j+1}h(0) s^{3j+1}/(3j+1)!, coefficients chosen
// order by order so that d_s P_(j)(v0^delta)(0) = 0. P_(j)(v0^delta)_s(0)
// moves by alpha^j times the tangential part of the new coefficient, so each
// stage is a short fixed-point iteration on the jet. For alpha > 0 the
// conditions P_(j)(0) = 0 also need d^{3j}h(0), solved first.
inline CorrectionResult correct_datum(const Field3& v0, double delta, int m,
                                      const SimParams& params, const GridSpec& g,
                                      const CorrectionConfig& cfg = {}) {
    require_aligned(v0.size(), g, "correct_datum");
    if (m < 0) throw ValidationError("correct_datum: m must be >= 0");
    if (!(delta >= 0.0)) throw ValidationError("correct_datum: delta must be >= 0");
    const double drift = sup_norm_unit_drift(v0);
    if (drift > 1e-12)
        throw PreconditionError("correct_datum: datum is not unit length (drift " +
                                std::to_string(drift) + ")");

    SimParams pd = params;
    pd.delta = delta;
    SimParams p0 = params;
    p0.delta = 0.0;

    CorrectionResult res;
    res.coefficients.assign(m + 1, Vec3{});
    res.cubic_coefficients.assign(m + 1, Vec3{});
    res.h_field.assign(v0.size(), Vec3{});

    const auto before = check_compatibility(v0, pd, g, m, cfg.residual_tol, {m, 1e-5, cfg.jet_extra});
    res.residual_before = order_residuals(before);
    if (delta == 0.0 || m == 0) {
        res.corrected = v0;
        res.residual_after = res.residual_before;
        return res;
    }

    const auto base = check_compatibility(v0, p0, g, m, cfg.precondition_tol, {m, 1e-5, cfg.jet_extra});
    if (!base.passed())
        throw PreconditionError("correct_datum: datum fails the delta = 0 compatibility conditions up "
                                "to order " + std::to_string(m));

    const bool pos = params.regime() == Regime::PosAlpha;
    const Jet3 j0 = boundary_jet(v0, g, 3 * m + 1, cfg.jet_extra);
    const Vec3 t0 = v0[0];
    auto tangential = [&](const Vec3& x) { return x - dot(t0, x) * t0; };

    Jet3 hj;
    hj.c.assign(j0.size(), Vec3{});
    auto p_at = [&](int j) {
        return p_sequence(JetCalculus{}, normalized(j0 + hj), j, params.alpha, delta)[j];
    };

    for (int j = 1; j <= m; ++j) {
        const double aj = std::pow(params.alpha, j);
        if (pos) {
            const int idx = 3 * j;
            for (int it = 0; it < cfg.max_iterations; ++it) {
                const Vec3 r = tangential(p_at(j).value(0));
                hj.c[idx] -= (1.0 / (aj * factorial(idx))) * r;
                if (max_abs(r) <= 1e-15 * (1.0 + max_abs(hj.c[idx]) * factorial(idx))) break;
            }
            res.cubic_coefficients[j] = hj.c[idx] * factorial(idx);
        }
        const int idx = 3 * j + 1;
        for (int it = 0; it < cfg.max_iterations; ++it) {
            const Vec3 r = tangential(p_at(j).value(1));
            hj.c[idx] -= (1.0 / (aj * factorial(idx))) * r;
            if (max_abs(r) <= 1e-15 * (1.0 + max_abs(hj.c[idx]) * factorial(idx))) break;
        }
        res.coefficients[j] = hj.c[idx] * factorial(idx);
    }

    Field3 corrected(v0.size());
    for (std::size_t i = 0; i < v0.size(); ++i) {
        const double s = g.s(i);
        const double phi = cutoff(s, cfg.cutoff_support);
        Vec3 h{};
        if (phi != 0.0) {
            double sp = 1.0;
            for (std::size_t k = 1; k < hj.size(); ++k) {
                sp *= s;
                h += sp * hj.c[k];
            }
            h *= phi;
        }
        res.h_field[i] = h;
        const Vec3 w = v0[i] + h;
        corrected[i] = w / norm(w);
    }
    res.corrected = std::move(corrected);

    const auto after =
        check_compatibility(res.corrected, pd, g, m, cfg.residual_tol, {m, 1e-5, cfg.jet_extra});
    res.residual_after = order_residuals(after);
    double cmax = 0.0;
    for (int j = 0; j <= m; ++j)
        cmax = std::fmax(cmax, std::fmax(norm(res.coefficients[j]), norm(res.cubic_coefficients[j])));
    res.coefficient_constant = cmax / delta;
    return res;
}

// ---------------------------------------------------------------------------

inline void require_unit(const Field3& V, double tol, const char* what) {
    const double drift = sup_norm_unit_drift(V);
    if (drift > tol)
        throw PreconditionError(std::string(what) + ": field is not unit length (drift " +
                                std::to_string(drift) + ")");
}

// max_i | sum_k C(m,k) g_k(V) . g_{m-k}(V) |, which vanishes for |V| = 1.
inline double verify_inner_identity(const Field3& V, int m, const SimParams& params,
                                    const GridSpec& g) {
    require_unit(V, 1e-12, "verify_inner_identity");
    const auto P = compute_P_sequence(m, V, params, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        double acc = 0.0;
        for (int k = 0; k <= m; ++k) acc += binomial(m, k) * dot(P[k][i], P[m - k][i]);
        worst = std::fmax(worst, std::fabs(acc));
    }
    return worst;
}

// For each delta compares (g^delta_m - f_m)/delta with r^delta_m from its own
// recursion; returns the largest discrepancy over the deltas.
inline double verify_remain_expansion(const Field3& V, int m, const std::vector<double>& deltas,
                                      const SimParams& params, const GridSpec& g,
                                      double eps = 1e-5) {
    if (m < 1) throw ValidationError("verify_remain_expansion: m must be >= 1");
    const Field3 f = compute_Q(m, V, params, g);
    double worst = 0.0;
    for (double d : deltas) {
        if (!(d > 0.0)) throw ValidationError("verify_remain_expansion: deltas must be positive");
        SimParams pd = params;
        pd.delta = d;
        const Field3 quotient = (1.0 / d) * (compute_P(m, V, pd, g) - f);
        const Field3 r = evaluate_sequence(SequenceKind::R, m, V, pd, g, eps);
        worst = std::fmax(worst, max_abs_diff(quotient, r));
    }
    return worst;
}

}  // namespace vfe
