#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "vfe/compatibility.hpp"
#include "vfe/core.hpp"
#include "vfe/diagnostics.hpp"
#include "vfe/initial_conditions.hpp"
#include "vfe/operators.hpp"
#include "vfe/stencil.hpp"

namespace vfe {

enum class RightBoundary { Clamp, Extrapolation };

// Lagrange weights evaluating the interpolant through nodes xs at z.
inline std::vector<double> lagrange_weights(double z, const std::vector<double>& xs) {
    return fornberg_weights(z, xs, 0)[0];
}

// Dense Gauss-Jordan inverse with partial pivoting (small systems only).
inline std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        if (std::fabs(a[piv][c]) < 1e-300) throw NumericalError("boundary closure: singular ghost system");
        std::swap(a[c], a[piv]);
        std::swap(inv[c], inv[piv]);
        const double d = a[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0) continue;
            const double f = a[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

// Ghost values at an end that carries two conditions, v = c and v_s = 0.
// In the inward coordinate r = distance from the end, the ghosts solve the
// centered v_s = 0, the relation a v_sss + delta v_ss + c x v_ss = 0 obtained
// from v_t = 0 at the end (a = alpha on the left, -alpha on the right), and
// polynomial extrapolation for ghosts beyond the second.
class PinnedEnd {
public:
    PinnedEnd() = default;
    PinnedEnd(int p, double a, double delta, double h, Vec3 c) : p_(p), a_(a), delta_(delta), h_(h), c_(c) {
        G_ = centered_half_width(3, p);
        const int q = p == 2 ? 0 : (p == 4 ? 5 : 6);
        std::vector<double> xs;
        for (int j = -2; j <= q - 2; ++j) xs.push_back(j);
        for (int r = 3; r <= G_; ++r) extrap_.push_back(lagrange_weights(-r, xs));
        K_ = std::max(G_, q - 1) + 1;
        const int nu = 3 * G_;
        std::vector<std::vector<double>> M(nu, std::vector<double>(nu, 0.0));
        const std::vector<Vec3> zero(K_);
        for (int col = 0; col < nu; ++col) {
            std::vector<Vec3> gh(G_);
            gh[col / 3][col % 3] = 1.0;
            const std::vector<double> r = residual(gh, zero);
            for (int row = 0; row < nu; ++row) M[row][col] = r[row];
        }
        Minv_ = invert(M);
    }

    int inner_nodes() const { return K_; }

    // inner[j]: value j nodes inside the end (inner[0] = c); returns ghosts
    // ordered by distance 1..G.
    std::vector<Vec3> ghosts(const std::vector<Vec3>& inner) const {
        const std::vector<double> b = residual(std::vector<Vec3>(G_), inner);
        const int nu = 3 * G_;
        std::vector<Vec3> gh(G_);
        for (int r = 0; r < nu; ++r) {
            double acc = 0.0;
            for (int col = 0; col < nu; ++col) acc -= Minv_[r][col] * b[col];
            gh[r / 3][r % 3] = acc;
        }
        return gh;
    }

private:
    // Affine in (ghosts, inner); scaled by h^3 for conditioning.
    std::vector<double> residual(const std::vector<Vec3>& gh, const std::vector<Vec3>& inner) const {
        auto at = [&](int j) -> Vec3 { return j >= 0 ? inner[j] : gh[-j - 1]; };
        auto centered = [&](int k) {
            const DerivativeOp& op = derivative_op(k, p_);
            Vec3 acc;
            for (int j = -op.m; j <= op.m; ++j) acc += op.interior[j + op.m] * at(j);
            return acc;
        };
        std::vector<double> res;
        auto push = [&](const Vec3& x) {
            for (int i = 0; i < 3; ++i) res.push_back(x[i]);
        };
        push(centered(1));
        const Vec3 d2 = centered(2);
        push(a_ * centered(3) + (delta_ * h_) * d2 + h_ * cross(c_, d2));
        for (int r = 3; r <= G_; ++r) {
            Vec3 acc = at(-r);
            const auto& w = extrap_[r - 3];
            for (std::size_t i = 0; i < w.size(); ++i) acc -= w[i] * at(static_cast<int>(i) - 2);
            push(acc);
        }
        return res;
    }

    int p_ = 4;
    double a_ = 1.0;
    double delta_ = 0.0;
    double h_ = 1.0;
    Vec3 c_;
    int G_ = 0;
    int K_ = 0;
    std::vector<std::vector<double>> extrap_;
    std::vector<std::vector<double>> Minv_;
};

// Ghost-cell closure of the half-line problem (plain wrapping on periodic
// grids). The end where the third-order term points inward carries two
// conditions, the other one:
//   left,  alpha > 0: v(0) = e3, v_s(0) = 0 (PinnedEnd with a = alpha).
//   left,  alpha < 0: node 0 solves the one-sided order-p v_s(0) = 0; ghosts
//                     by polynomial extrapolation of degree p+2.
//   right, clamp:     v(L) held at the far-field value; alpha < 0 adds
//                     v_s(L) = 0 (PinnedEnd with a = -alpha), alpha > 0 uses
//                     extrapolated ghosts.
//   right, extrapolation: free end, ghosts extrapolated.
// Even reflection on the left, and clamping every right ghost to the far
// field, were unstable or reflected grid-scale waves in testing.
class BoundaryClosure {
public:
    BoundaryClosure(const SimParams& params, const GridSpec& g, RightBoundary right = RightBoundary::Clamp,
                    Vec3 far_field = e3)
        : params_(params), g_(g), right_(right), far_(far_field) {
        params.validate();
        const int p = params.stencil_order;
        G_ = centered_half_width(3, p);
        if (g.is_periodic()) return;
        if (static_cast<int>(g.n()) < 4 * (p + 4))
            throw ResolutionError("boundary closure: grid too coarse for stencil order " + std::to_string(p));
        std::vector<double> xs;
        for (int j = 0; j <= p + 2; ++j) xs.push_back(j);
        for (int r = 1; r <= G_; ++r) extrap_w_.push_back(lagrange_weights(-r, xs));
        if (params.regime() == Regime::NegAlpha) {
            const auto& row = derivative_op(1, p).left[0];
            node0_w_.assign(row.begin(), row.end());
            if (right == RightBoundary::Clamp)
                right_pin_ = PinnedEnd(p, -params.alpha, params.delta, g.h(), far_field);
        } else {
            left_pin_ = PinnedEnd(p, params.alpha, params.delta, g.h(), e3);
        }
    }

    int ghosts() const { return G_; }

    // Algebraic boundary relations at the end nodes (no-op on periodic grids).
    void enforce(Field3& v) const {
        if (g_.is_periodic()) return;
        if (right_ == RightBoundary::Clamp) v.back() = far_;
        if (params_.regime() == Regime::PosAlpha) {
            v[0] = e3;
            return;
        }
        Vec3 acc;
        for (std::size_t j = 1; j < node0_w_.size(); ++j) acc += node0_w_[j] * v[j];
        v[0] = (-1.0 / node0_w_[0]) * acc;
    }

    // v with G ghost values on each side.
    Field3 extend(const Field3& v) const {
        const std::size_t n = v.size();
        Field3 ext(n + 2 * G_);
        std::copy(v.begin(), v.end(), ext.begin() + G_);
        if (g_.is_periodic()) {
            for (int r = 1; r <= G_; ++r) {
                ext[G_ - r] = v[n - r];
                ext[G_ + n - 1 + r] = v[r - 1];
            }
            return ext;
        }
        auto extrapolate = [&](int r, bool right) {
            Vec3 acc;
            const auto& w = extrap_w_[r - 1];
            for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * (right ? v[n - 1 - j] : v[j]);
            return acc;
        };
        if (params_.regime() == Regime::PosAlpha) {
            const std::vector<Vec3> gh = left_pin_.ghosts({v.begin(), v.begin() + left_pin_.inner_nodes()});
            for (int r = 1; r <= G_; ++r) ext[G_ - r] = gh[r - 1];
        } else {
            for (int r = 1; r <= G_; ++r) ext[G_ - r] = extrapolate(r, false);
        }
        if (params_.regime() == Regime::NegAlpha && right_ == RightBoundary::Clamp) {
            std::vector<Vec3> inner(v.rbegin(), v.rbegin() + right_pin_.inner_nodes());
            const std::vector<Vec3> gh = right_pin_.ghosts(inner);
            for (int r = 1; r <= G_; ++r) ext[G_ + n - 1 + r] = gh[r - 1];
        } else {
            for (int r = 1; r <= G_; ++r) ext[G_ + n - 1 + r] = extrapolate(r, true);
        }
        return ext;
    }

    // Semi-discrete right-hand side on an enforced field; nodes fixed by
    // enforce() carry no evolution.
    Field3 rhs(const Field3& v) const {
        const Field3 ext = extend(v);
        const int p = params_.stencil_order;
        const double h = g_.h();
        const std::size_t n = v.size();
        Derivs d{apply_centered(ext, G_, n, derivative_op(1, p), h),
                 apply_centered(ext, G_, n, derivative_op(2, p), h),
                 apply_centered(ext, G_, n, derivative_op(3, p), h)};
        Field3 out = rhs_transformed_from(v, d, params_.alpha, params_.delta);
        if (!g_.is_periodic()) {
            out[0] = Vec3{};
            if (right_ == RightBoundary::Clamp) out.back() = Vec3{};
        }
        return out;
    }

    const Vec3& far_field() const { return far_; }

private:
    SimParams params_;
    GridSpec g_;
    RightBoundary right_;
    Vec3 far_;
    int G_ = 0;
    std::vector<double> node0_w_;
    std::vector<std::vector<double>> extrap_w_;
    PinnedEnd left_pin_;
    PinnedEnd right_pin_;
};

inline Field3 enforce_boundary(Field3 v, const SimParams& params, const GridSpec& g) {
    require_aligned(v.size(), g, "enforce_boundary");
    BoundaryClosure(params, g).enforce(v);
    return v;
}

// max over theta of |sum_j w_j exp(i j theta)| for the centered k-th
// derivative row at accuracy p (unit spacing).
inline double stencil_symbol_max(int k, int p) {
    const DerivativeOp& op = derivative_op(k, p);
    double best = 0.0;
    const int samples = 4096;
    for (int s = 0; s <= samples; ++s) {
        const double th = std::numbers::pi * s / samples;
        std::complex<double> z;
        for (int j = -op.m; j <= op.m; ++j) z += op.interior[j + op.m] * std::polar(1.0, j * th);
        best = std::fmax(best, std::abs(z));
    }
    return best;
}

// RK4 stability intervals: imaginary axis 2 sqrt(2), negative real axis 2.785293563.
inline constexpr double kRk4Imag = 2.0 * std::numbers::sqrt2;
inline constexpr double kRk4Real = 2.785293563405282;

inline double stable_dt(const SimParams& params, const GridSpec& g) {
    params.validate();
    const int p = params.stencil_order;
    const double h = g.h();
    const double c3 = kRk4Imag / stencil_symbol_max(3, p);
    const double c2 = kRk4Real / stencil_symbol_max(2, p);
    const double dt3 = c3 * h * h * h / std::fabs(params.alpha);
    const double dt2 = params.delta > 0.0 ? c2 * h * h / params.delta : std::numeric_limits<double>::infinity();
    return params.cfl_safety * std::min(dt3, dt2);
}

struct RunConfig {
    SimParams params;
    GridSpec grid = GridSpec::half_line(512, 40.0);
    double dt = 0.0;  // <= 0 selects stable_dt
    double t_final = 0.05;
    IcSpec ic;
    bool project_unit_norm = false;
    int diagnostics_every = 10;
    RightBoundary right_boundary = RightBoundary::Clamp;
    double drift_abort = 1e-2;
    double far_field_tol = 1e-6;
    int compat_order = 1;
    double compat_tol = 1e-6;
    int correct_order = 0;  // > 0: apply correct_datum(v0, delta, m) before the run
    bool track_x = false;
    Field3 initial;  // overrides ic when non-empty

    void validate() const {
        params.validate();
        if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ValidationError("run.t_final must be > 0");
        if (dt < 0.0 || !std::isfinite(dt)) throw ValidationError("run.dt must be > 0 when given");
        if (diagnostics_every < 1) throw ValidationError("run.diagnostics_every must be >= 1");
        if (!(drift_abort > 0.0)) throw ValidationError("run.drift_abort must be > 0");
        if (!initial.empty()) require_aligned(initial.size(), grid, "RunConfig.initial");
    }
};

// One explicit RK4 step with the boundary closure applied at every stage.
class Stepper {
public:
    Stepper(const RunConfig& config, Vec3 far_field = e3)
        : config_(config), closure_(config.params, config.grid, config.right_boundary, far_field),
          dt_stable_(stable_dt(config.params, config.grid)) {}

    const BoundaryClosure& closure() const { return closure_; }
    double dt_stable() const { return dt_stable_; }

    SimState step(const SimState& s, double dt) const {
        const Field3& v = s.v;
        auto stage = [&](const Field3& k, double c) {
            Field3 y = v;
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * k[i];
            closure_.enforce(y);
            return y;
        };
        const Field3 k1 = closure_.rhs(v);
        const Field3 k2 = closure_.rhs(stage(k1, 0.5 * dt));
        const Field3 k3 = closure_.rhs(stage(k2, 0.5 * dt));
        const Field3 k4 = closure_.rhs(stage(k3, dt));
        SimState out = s;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.v[i] = v[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (config_.project_unit_norm) out.v = normalized(std::move(out.v));
        closure_.enforce(out.v);

        const double before = std::fmax(1.0, max_abs(v));
        const double after = max_abs(out.v);
        if (!all_finite(out.v) || !(after <= 10.0 * before))
            throw InstabilityError("instability at t = " + fmt17(s.t + dt) + ": sup|v| grew from " +
                                   fmt17(before) + " to " + fmt17(after) + " in one step, dt/stable_dt = " +
                                   fmt17(dt / dt_stable_));
        if (!s.x.empty()) {
            const Field3 a = rhs_x_integrand(v, config_.params, config_.grid);
            const Field3 b = rhs_x_integrand(out.v, config_.params, config_.grid);
            for (std::size_t i = 0; i < v.size(); ++i) out.x[i] += (0.5 * dt) * (a[i] + b[i]);
        }
        out.t = s.t + dt;
        out.step_count = s.step_count + 1;
        return out;
    }

private:
    RunConfig config_;
    BoundaryClosure closure_;
    double dt_stable_;
};

inline SimState step(const SimState& state, double dt, const RunConfig& config) {
    require_aligned(state.v.size(), config.grid, "step");
    return Stepper(config, state.far_field).step(state, dt);
}

struct RunResult {
    SimState state;
    std::vector<DiagnosticsRecord> records;
    CompatibilityReport compat;
    std::vector<std::string> warnings;
    double dt = 0.0;
    long steps = 0;
};

using Observer = std::function<void(const SimState&)>;

// Number of steps and the adjusted dt that lands exactly on t_final.
inline std::pair<long, double> step_plan(double t_final, double dt_max) {
    const long n = std::max(1L, static_cast<long>(std::ceil(t_final / dt_max - 1e-9)));
    return {n, t_final / static_cast<double>(n)};
}

inline Field3 initial_field(const RunConfig& config) {
    const bool halfline = !config.grid.is_periodic();
    Field3 v0 = config.initial.empty()
                    ? load_initial_condition(config.ic, config.grid, config.params,
                                             halfline && config.right_boundary == RightBoundary::Clamp)
                    : config.initial;
    if (config.correct_order > 0 && config.params.delta > 0.0 && halfline)
        v0 = correct_datum(v0, config.params.delta, config.correct_order, config.params, config.grid).corrected;
    return v0;
}

inline RunResult run(const RunConfig& config, const Observer& observer = {}) {
    config.validate();
    const GridSpec& g = config.grid;
    const bool halfline = !g.is_periodic();
    RunResult res;
    Field3 v0 = initial_field(config);

    if (halfline) {
        res.compat = check_compatibility(v0, config.params, g, config.compat_order, config.compat_tol);
        if (!res.compat.passed())
            res.warnings.push_back("initial condition fails compatibility up to order " +
                                   std::to_string(config.compat_order) + " (tolerance " +
                                   fmt17(config.compat_tol) + ")");
    }

    SimState s;
    s.far_field = halfline ? v0.back() : e3;
    const Stepper stepper(config, s.far_field);
    stepper.closure().enforce(v0);
    s.v = std::move(v0);
    if (config.track_x) s.x = cumulative_integral(s.v, g);

    const auto [nsteps, dt] = step_plan(config.t_final, config.dt > 0.0 ? config.dt : stepper.dt_stable());
    res.dt = dt;
    if (config.dt > 0.0 && dt > stepper.dt_stable())
        res.warnings.push_back("dt exceeds the stability estimate (dt/stable_dt = " +
                               fmt17(dt / stepper.dt_stable()) + ")");

    const std::size_t n = g.n();
    const std::size_t far_start = n - 1 - (n - 1) / 10;
    auto sample = [&] {
        res.records.push_back(record(s, config.params, g));
        if (observer) observer(s);
    };
    sample();
    for (long k = 1; k <= nsteps; ++k) {
        s = stepper.step(s, dt);
        if (k == nsteps) s.t = config.t_final;
        const double drift = sup_norm_unit_drift(s.v);
        if (drift > config.drift_abort)
            throw NumericalError("unit-norm drift " + fmt17(drift) + " exceeds run.drift_abort at t = " +
                                 fmt17(s.t));
        if (halfline && config.right_boundary == RightBoundary::Clamp) {
            double act = 0.0;
            for (std::size_t i = far_start; i < n; ++i) act = std::fmax(act, max_abs(s.v[i] - s.far_field));
            if (act > config.far_field_tol)
                throw NumericalError("far-field activity " + fmt17(act) + " exceeds " +
                                     fmt17(config.far_field_tol) + " at t = " + fmt17(s.t) +
                                     "; enlarge grid.length");
        }
        if (k % config.diagnostics_every == 0 || k == nsteps) sample();
    }
    res.steps = nsteps;
    res.state = std::move(s);
    return res;
}

// x(t_last) = x0 + int rhs_x_integrand dt over the samples; Simpson for an odd
// number of uniformly spaced samples, trapezoid otherwise.
inline Field3 reconstruct_x(const std::vector<Field3>& samples, const std::vector<double>& times,
                            const Field3& x0, const SimParams& params, const GridSpec& g) {
    if (samples.size() < 2) throw ValidationError("reconstruct_x needs at least 2 samples");
    if (times.size() != samples.size()) throw ValidationError("reconstruct_x: samples and times differ in length");
    require_aligned(x0.size(), g, "reconstruct_x");
    std::vector<Field3> f;
    for (const auto& v : samples) f.push_back(rhs_x_integrand(v, params, g));
    const std::size_t m = samples.size();
    bool uniform = true;
    const double dt0 = times[1] - times[0];
    for (std::size_t k = 1; k < m; ++k)
        uniform = uniform && std::fabs((times[k] - times[k - 1]) - dt0) <= 1e-12 * std::fabs(dt0);
    Field3 x = x0;
    if (m % 2 == 1 && m >= 3 && uniform) {
        for (std::size_t k = 0; k < m; ++k) {
            const double w = (k == 0 || k + 1 == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += (w * dt0 / 3.0) * f[k][i];
        }
    } else {
        for (std::size_t k = 1; k < m; ++k) {
            const double d = times[k] - times[k - 1];
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += (0.5 * d) * (f[k - 1][i] + f[k][i]);
        }
    }
    return x;
}

inline double h1_norm(const Field3& V, const GridSpec& g, int p) {
    const double a = l2_norm(V, g);
    const double b = l2_norm(diff(V, 1, g, p), g);
    return std::sqrt(a * a + b * b);
}

// Least-squares slope of log y against log x over finite positive pairs.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    if (lx.size() < 2) return std::nan("");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : std::nan("");
}

struct ContinuationResult {
    std::vector<double> deltas;
    std::vector<double> pairwise_h1_diffs;  // entry i compares deltas[i] and deltas[i+1]
    double observed_rate = std::nan("");  // slope of log diff against log(delta_i + delta_{i+1})
    std::vector<std::string> failures;
    double dt = 0.0;
    bool complete() const { return failures.empty(); }
};

// Runs one member per delta with the corrected datum of order m and a
// shared dt; members execute concurrently and are merged by index.
inline ContinuationResult delta_continuation(const RunConfig& config, const std::vector<double>& deltas,
                                             int m = 1) {
    if (deltas.size() < 2) throw ValidationError("continuation needs at least two deltas");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) throw ValidationError("continuation deltas must be positive");
        if (i > 0 && deltas[i] > deltas[i - 1])
            throw ValidationError("continuation deltas must be decreasing");
    }
    ContinuationResult out;
    out.deltas = deltas;
    double dt = config.dt;
    if (dt <= 0.0) {
        dt = std::numeric_limits<double>::infinity();
        for (double d : deltas) {
            SimParams p = config.params;
            p.delta = d;
            dt = std::min(dt, stable_dt(p, config.grid));
        }
    }
    out.dt = dt;
    std::vector<std::future<Field3>> jobs;
    for (double d : deltas) {
        RunConfig c = config;
        c.params.delta = d;
        c.correct_order = m;
        c.dt = dt;
        c.diagnostics_every = std::numeric_limits<int>::max();
        jobs.push_back(std::async(std::launch::async, [c] { return run(c).state.v; }));
    }
    std::vector<Field3> finals(deltas.size());
    std::vector<bool> ok(deltas.size(), false);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
            finals[i] = jobs[i].get();
            ok[i] = true;
        } catch (const Error& e) {
            out.failures.push_back("delta = " + fmt17(deltas[i]) + ": " + e.what());
        }
    }
    std::vector<double> sums;
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
        const double d = (ok[i] && ok[i + 1])
                              ? h1_norm(finals[i] - finals[i + 1], config.grid, config.params.stencil_order)
                              : std::nan("");
        out.pairwise_h1_diffs.push_back(d);
        sums.push_back(deltas[i] + deltas[i + 1]);
    }
    out.observed_rate = loglog_slope(sums, out.pairwise_h1_diffs);
    return out;
}

struct RefinementLevel {
    std::size_t n = 0;
    double dt = 0.0;
    double drift = 0.0;
    double diff_to_next = std::nan("");  // max |v_l - v_{l+1}| on the coarse nodes
    double order = std::nan("");         // log2 of successive diff ratios
    double drift_order = std::nan("");
};

// Joint (h, dt) refinement: level l uses refined() l times and, unless an
// explicit dt is set (then halved per level), the stable dt of its grid.
inline std::vector<RefinementLevel> convergence_study(const RunConfig& config, int levels) {
    if (levels < 2) throw ValidationError("convergence study needs at least 2 levels");
    std::vector<RunConfig> cfgs;
    RunConfig c = config;
    c.diagnostics_every = std::numeric_limits<int>::max();
    for (int l = 0; l < levels; ++l) {
        cfgs.push_back(c);
        c.grid = c.grid.refined();
        if (c.dt > 0.0) c.dt *= 0.5;
    }
    std::vector<std::future<RunResult>> jobs;
    for (const auto& cc : cfgs) jobs.push_back(std::async(std::launch::async, [cc] { return run(cc); }));
    std::vector<RunResult> res;
    for (auto& j : jobs) res.push_back(j.get());
    std::vector<RefinementLevel> out(levels);
    for (int l = 0; l < levels; ++l) {
        out[l].n = cfgs[l].grid.n();
        out[l].dt = res[l].dt;
        out[l].drift = sup_norm_unit_drift(res[l].state.v);
        if (l + 1 < levels) {
            double d = 0.0;
            for (std::size_t i = 0; i < res[l].state.v.size(); ++i)
                d = std::fmax(d, max_abs(res[l].state.v[i] - res[l + 1].state.v[2 * i]));
            out[l].diff_to_next = d;
        }
    }
    for (int l = 1; l + 1 < levels; ++l) out[l].order = std::log2(out[l - 1].diff_to_next / out[l].diff_to_next);
    for (int l = 1; l < levels; ++l) out[l].drift_order = std::log2(out[l - 1].drift / out[l].drift);
    return out;
}

}  // namespace vfe
