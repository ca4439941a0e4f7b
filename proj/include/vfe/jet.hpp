#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "vfe/core.hpp"
#include "vfe/stencil.hpp"

namespace vfe {

// Truncated Taylor expansion at s = 0: c[k] = f^(k)(0) / k!.
// Arithmetic keeps the shortest operand length, so coefficients that are
// not determined by the inputs are never invented.
template <class T>
struct Jet {
    std::vector<T> c;

    std::size_t size() const { return c.size(); }
    // k-th derivative value at s = 0.
    T value(int k = 0) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c.at(k) * f;
    }
};

using Jet3 = Jet<Vec3>;
using Jet1 = Jet<double>;

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
    Jet<T> r;
    r.c.resize(std::min(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}

template <class T>
Jet<T>& operator+=(Jet<T>& a, const Jet<T>& b) {
    a.c.resize(std::min(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) a.c[i] += b.c[i];
    return a;
}

template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
    Jet<T> r;
    r.c.resize(std::min(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}

template <class T>
Jet<T> operator*(double s, Jet<T> a) {
    for (auto& x : a.c) x = s * x;
    return a;
}

template <class T>
Jet<T> derivative(const Jet<T>& a, int k = 1) {
    Jet<T> r;
    if (a.size() <= static_cast<std::size_t>(k)) return r;
    r.c.resize(a.size() - k);
    for (std::size_t i = 0; i < r.size(); ++i) {
        double f = 1.0;
        for (int j = 1; j <= k; ++j) f *= static_cast<double>(i + j);
        r.c[i] = f * a.c[i + k];
    }
    return r;
}

template <class A, class B, class Op>
auto cauchy(const Jet<A>& a, const Jet<B>& b, Op op) {
    using R = decltype(op(a.c[0], b.c[0]));
    Jet<R> r;
    const std::size_t n = std::min(a.size(), b.size());
    r.c.assign(n, R{});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) r.c[i] += op(a.c[j], b.c[i - j]);
    return r;
}

inline Jet3 cross(const Jet3& a, const Jet3& b) {
    return cauchy(a, b, [](const Vec3& x, const Vec3& y) { return cross(x, y); });
}

inline Jet1 dot(const Jet3& a, const Jet3& b) {
    return cauchy(a, b, [](const Vec3& x, const Vec3& y) { return dot(x, y); });
}

inline Jet3 mul(const Jet1& s, const Jet3& a) {
    return cauchy(s, a, [](double x, const Vec3& y) { return x * y; });
}

// f^a for a scalar jet with f(0) > 0 (J.C.P. Miller recurrence).
inline Jet1 power(const Jet1& f, double a) {
    Jet1 g;
    if (f.size() == 0) return g;
    if (!(f.c[0] > 0.0)) throw NumericalError("jet power: non-positive leading coefficient");
    g.c.assign(f.size(), 0.0);
    g.c[0] = std::pow(f.c[0], a);
    for (std::size_t n = 1; n < f.size(); ++n) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            acc += ((a + 1.0) * static_cast<double>(k) - static_cast<double>(n)) * f.c[k] * g.c[n - k];
        g.c[n] = acc / (static_cast<double>(n) * f.c[0]);
    }
    return g;
}

inline Jet3 normalized(const Jet3& v) { return mul(power(dot(v, v), -0.5), v); }

// Taylor jet of a grid field at s = 0 from one-sided stencils on the first
// degree+1+extra nodes (exact for polynomials of that degree minus one).
inline Jet3 boundary_jet(const Field3& f, const GridSpec& g, int degree, int extra) {
    require_aligned(f.size(), g, "boundary_jet");
    const std::size_t npts = static_cast<std::size_t>(degree + 1 + extra);
    if (npts > g.n() / 2)
        throw ResolutionError("boundary jet of degree " + std::to_string(degree) + " needs " +
                              std::to_string(npts) + " nodes, grid offers " +
                              std::to_string(g.n() / 2));
    std::vector<double> x(npts);
    for (std::size_t j = 0; j < npts; ++j) x[j] = static_cast<double>(j);
    const auto w = fornberg_weights(0.0, x, degree);
    Jet3 jet;
    jet.c.resize(degree + 1);
    jet.c[0] = f[0];
    double fact = 1.0;
    for (int k = 1; k <= degree; ++k) {
        fact *= k;
        Vec3 acc{};
        for (std::size_t j = 1; j < npts; ++j) acc += w[k][j] * (f[j] - f[0]);
        jet.c[k] = acc * (inv_pow(g.h(), k) / fact);
    }
    return jet;
}

}  // namespace vfe
