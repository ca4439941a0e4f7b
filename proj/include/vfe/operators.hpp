#pragma once

#include <cstddef>
#include <vector>

#include "vfe/core.hpp"
#include "vfe/stencil.hpp"

namespace vfe {

// Discrete k-th derivative. Half-line grids use centered rows in the
// interior and one-sided rows of the same formal accuracy near both ends;
// periodic grids use the centered row everywhere. Each row acts on
// differences f_j - f_i, so constants map to exact zeros.
template <class T>
std::vector<T> diff(const std::vector<T>& f, int k, const GridSpec& g, int p) {
    require_aligned(f.size(), g, "diff");
    const std::size_t n = g.n();
    if (k < 1) throw ValidationError("diff: derivative order must be >= 1");
    if (static_cast<std::size_t>(k + p) > n / 2)
        throw ResolutionError("diff: k+p = " + std::to_string(k + p) + " exceeds N/2 = " +
                              std::to_string(n / 2));
    const DerivativeOp& op = derivative_op(k, p);
    const double scale = inv_pow(g.h(), k);
    const int m = op.m;
    std::vector<T> out(n);

    if (g.is_periodic()) {
        const long nn = static_cast<long>(n);
        for (long i = 0; i < nn; ++i) {
            T acc{};
            for (int j = -m; j <= m; ++j) {
                if (j == 0) continue;
                const long idx = ((i + j) % nn + nn) % nn;
                acc += op.interior[j + m] * (f[idx] - f[i]);
            }
            out[i] = acc * scale;
        }
        return out;
    }

    const std::size_t width = static_cast<std::size_t>(k + p);
    for (std::size_t i = static_cast<std::size_t>(m); i + m < n; ++i) {
        T acc{};
        for (int j = -m; j <= m; ++j) {
            if (j == 0) continue;
            acc += op.interior[j + m] * (f[i + j] - f[i]);
        }
        out[i] = acc * scale;
    }
    const double rs = op.right_sign();
    for (int r = 0; r < m; ++r) {
        const auto& w = op.left[r];
        T lo{};
        T hi{};
        const std::size_t ir = n - 1 - r;
        for (std::size_t j = 0; j < width; ++j) {
            lo += w[j] * (f[j] - f[r]);
            hi += w[j] * (f[n - 1 - j] - f[ir]);
        }
        out[r] = lo * scale;
        out[ir] = hi * (rs * scale);
    }
    return out;
}

// s-derivatives v_s, v_ss, v_sss evaluated once and shared by the kernels.
struct Derivs {
    Field3 d1;
    Field3 d2;
    Field3 d3;
};

inline Derivs derivatives(const Field3& v, const GridSpec& g, int p) {
    return {diff(v, 1, g, p), diff(v, 2, g, p), diff(v, 3, g, p)};
}

inline void require_finite(const Field3& v, const char* what) {
    if (!all_finite(v)) throw NumericalError(std::string(what) + ": non-finite input");
}

// Pointwise kernels on precomputed derivatives.
inline Vec3 transformed_point(const Vec3& v, const Vec3& v1, const Vec3& v2, const Vec3& v3,
                              double alpha, double delta) {
    const double vs2 = dot(v1, v1);
    Vec3 r = cross(v, v2) + alpha * (v3 + 3.0 * cross(v2, cross(v, v1)) - 1.5 * vs2 * v1);
    if (delta != 0.0) r += delta * (v2 + vs2 * v);
    return r;
}

inline Vec3 original_point(const Vec3& v, const Vec3& v1, const Vec3& v2, const Vec3& v3,
                           double alpha, double delta) {
    Vec3 r = cross(v, v2) +
             alpha * (v3 + 1.5 * cross(v2, cross(v, v1)) + 1.5 * cross(v1, cross(v, v2)));
    if (delta != 0.0) r += delta * (v2 + dot(v1, v1) * v);
    return r;
}

inline Vec3 x_integrand_point(const Vec3& v, const Vec3& v1, const Vec3& v2, double alpha) {
    return cross(v, v1) + alpha * v2 + 1.5 * alpha * cross(v1, cross(v, v1));
}

inline Field3 rhs_transformed_from(const Field3& v, const Derivs& d, double alpha, double delta) {
    Field3 out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = transformed_point(v[i], d.d1[i], d.d2[i], d.d3[i], alpha, delta);
    return out;
}

// v_t = v x v_ss + alpha{v_sss + 3 v_ss x (v x v_s) - 3/2 |v_s|^2 v_s}
//       + delta(v_ss + |v_s|^2 v)
inline Field3 rhs_v_transformed(const Field3& v, const SimParams& params, const GridSpec& g) {
    require_aligned(v.size(), g, "rhs_v_transformed");
    require_finite(v, "rhs_v_transformed");
    return rhs_transformed_from(v, derivatives(v, g, params.stencil_order), params.alpha,
                                params.delta);
}

// v_t = v x v_ss + alpha{v_sss + 3/2 v_ss x (v x v_s) + 3/2 v_s x (v x v_ss)}
//       + delta(v_ss + |v_s|^2 v)
inline Field3 rhs_v_original(const Field3& v, const SimParams& params, const GridSpec& g) {
    require_aligned(v.size(), g, "rhs_v_original");
    require_finite(v, "rhs_v_original");
    const Derivs d = derivatives(v, g, params.stencil_order);
    Field3 out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = original_point(v[i], d.d1[i], d.d2[i], d.d3[i], params.alpha, params.delta);
    return out;
}

// x_t = v x v_s + alpha v_ss + 3/2 alpha v_s x (v x v_s)
inline Field3 rhs_x_integrand(const Field3& v, const SimParams& params, const GridSpec& g) {
    require_aligned(v.size(), g, "rhs_x_integrand");
    require_finite(v, "rhs_x_integrand");
    const int p = params.stencil_order;
    const Field3 d1 = diff(v, 1, g, p);
    const Field3 d2 = diff(v, 2, g, p);
    Field3 out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = x_integrand_point(v[i], d1[i], d2[i], params.alpha);
    return out;
}

// Principal part linearized around w with frozen coefficients:
// alpha v_sss + delta v_ss + w x v_ss + 3 alpha v_ss x (w x w_s) + f.
inline Field3 linearized_rhs(const Field3& v, const Field3& w, const Field3& f,
                             const SimParams& params, const GridSpec& g) {
    require_aligned(v.size(), g, "linearized_rhs");
    require_aligned(w.size(), g, "linearized_rhs");
    require_aligned(f.size(), g, "linearized_rhs");
    require_finite(v, "linearized_rhs");
    require_finite(w, "linearized_rhs");
    require_finite(f, "linearized_rhs");
    const int p = params.stencil_order;
    const Field3 v2 = diff(v, 2, g, p);
    const Field3 v3 = diff(v, 3, g, p);
    const Field3 w1 = diff(w, 1, g, p);
    Field3 out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = params.alpha * v3[i] + params.delta * v2[i] + cross(w[i], v2[i]) +
                 3.0 * params.alpha * cross(v2[i], cross(w[i], w1[i])) + f[i];
    }
    return out;
}

}  // namespace vfe
