#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "vfe/core.hpp"

namespace vfe {

// Finite-difference weights (Fornberg 1988). Returns c[k][j], the weight of
// node x[j] in the k-th derivative at z, for k = 0..m.
inline std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> x, int m) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

// Half-width of the centered stencil for d^k/ds^k at formal accuracy p.
constexpr int centered_half_width(int k, int p) { return (k + 1) / 2 - 1 + p / 2; }

// Weights (unit spacing) for the k-th derivative at accuracy p: a centered
// interior row plus one-sided rows of k+p points for the first m nodes.
// Right-end rows are the mirror images times (-1)^k.
struct DerivativeOp {
    int k = 1;
    int p = 4;
    int m = 0;
    std::vector<double> interior;
    std::vector<std::vector<double>> left;

    DerivativeOp() = default;
    DerivativeOp(int k_, int p_) : k(k_), p(p_), m(centered_half_width(k_, p_)) {
        std::vector<double> xc;
        for (int j = -m; j <= m; ++j) xc.push_back(j);
        interior = fornberg_weights(0.0, xc, k)[k];
        std::vector<double> xs;
        for (int j = 0; j < k + p; ++j) xs.push_back(j);
        for (int i = 0; i < m; ++i) left.push_back(fornberg_weights(i, xs, k)[k]);
    }

    double right_sign() const { return (k % 2 == 0) ? 1.0 : -1.0; }
};

inline constexpr int kMaxDerivative = 9;

inline const DerivativeOp& derivative_op(int k, int p) {
    static const auto table = [] {
        std::array<std::array<DerivativeOp, 5>, kMaxDerivative + 1> t{};
        for (int kk = 1; kk <= kMaxDerivative; ++kk)
            for (int pp = 2; pp <= 8; pp += 2) t[kk][pp / 2] = DerivativeOp(kk, pp);
        return t;
    }();
    if (k < 1 || k > kMaxDerivative || p < 2 || p > 8 || p % 2 != 0)
        throw ValidationError("unsupported derivative order " + std::to_string(k) + " / accuracy " +
                              std::to_string(p));
    return table[k][p / 2];
}

inline double inv_pow(double h, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r /= h;
    return r;
}

// Centered stencil applied to nodes offset..offset+count-1 of an extended
// array that already carries enough ghost values on both sides.
template <class T>
std::vector<T> apply_centered(const std::vector<T>& ext, std::size_t offset, std::size_t count,
                              const DerivativeOp& op, double h) {
    std::vector<T> out(count);
    const double scale = inv_pow(h, op.k);
    const int m = op.m;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t c = offset + i;
        T acc{};
        for (int j = -m; j <= m; ++j) {
            if (j == 0) continue;
            acc += op.interior[j + m] * (ext[c + j] - ext[c]);
        }
        out[i] = acc * scale;
    }
    return out;
}

}  // namespace vfe
